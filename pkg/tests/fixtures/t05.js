var num = function (s, h) {
    return s ^ h;
}(683517, 683398);
console.log(num);
