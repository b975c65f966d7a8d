function calculateResult() {
    var message = "Hello World";
    var number = 42;
    var isActive = true;
    console.log(message);
    return number + 1;
}
calculateResult();
