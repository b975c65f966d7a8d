var _0x312g = ["Hello World"];
function calculateResult() {
    var message = _0x312g[0];
    var number = 42;
    var isActive = true;
    console.log(message);
    return number + 1;
}
calculateResult();
