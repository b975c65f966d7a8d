function calculateResult() {
    var message = "Hello World";
    var number = 683517 ^ 683355;
    var isActive = true;
    console.log(message);
    return number + (2047 ^ 2046);
}
calculateResult();
