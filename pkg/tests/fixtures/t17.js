function calculateResult() {
    var unusedVar = Math.random() * 1000;
    if (false) {
        console.log("This will never execute");
        return unusedVar;
    }
    var message = "Hello World";
    var number = 42;
    var isActive = true;
    console.log(message);

    if (1 === 0) {
        return number * unusedVar;
    }
    return number + 1;
    function deadFunction() {
        return unusedVar + 42;
    }
}
calculateResult();
