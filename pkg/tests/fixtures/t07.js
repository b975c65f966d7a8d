function calculateResult() {
    var message = "dlroW olleH".split("").reverse().join("");
    var number = 42;
    var isActive = true;
    console.log(message);
    return number + 1;
}
calculateResult();
