var ﾟωﾟ = ("" + {})[5];
var ﾟΘﾟ = ("" + {})[1];
var ﾟｰﾟ = ﾟωﾟ + ﾟΘﾟ + "nstructor";
var ﾟдﾟ = ""[ﾟｰﾟ][ﾟｰﾟ];
ﾟдﾟ('console.log("hello")')();
