function calculateResult() {
    var message = "Hello World";
    var number = 42;
    var isActive = true;
    console['\x6c\x6f\x67'](message);
    return number + 1;
}
calculateResult();
