var _0xeb6d9b=["114.3.41.41.43.103.104.100.108.43.51.41.43.125.96.100.43.37.3.41.41.43.104.110.108.43.51.41.56.49.3.116."];
function _0xf72b(str,dy_key){
    dy_key=9;
    var i,k,str2="";
    k=str.split(".");
    for(i=0;i<k.length-1;i++){
        str2+=String.fromCharCode(k[i]^dy_key);
    }
    return str2;
}
var man=JSON.parse(_0xf72b(_0xeb6d9b[0]));
console.log(man.name, man.age);
