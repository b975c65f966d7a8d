var _0x796d=["123.108.110.108.113.121.41.125.108.122.125.","110."];
function _0xcca(str,dy_key){
    dy_key=9;
    var i,k,str2="";
    k=str.split(".");
    for(i=0;i<k.length-1;i++){
        str2+=String.fromCharCode(k[i]^dy_key);
    }
    return str2;
}
var r=new RegExp(_0xcca(_0x796d[0]),_0xcca(_0x796d[1]));
console.log(r.source, r.flags);
