var _0x=['65.108.101.101.102.41.94.102.123.101.109.'];
function _0xa5bdc(str,dy_key){
    dy_key=9;
    var i,k,str2='';
    k=str.split('.');
    for(i=0;i<k.length-1;i++){
        str2+=String.fromCharCode(k[i]^dy_key);
    }
    return str2;
}
function calculateResult() {
    var message = _0xa5bdc(_0x[0]);
    var number = 42;
    var isActive = true;
    console.log(message);
    return number + 1;
}
calculateResult();
