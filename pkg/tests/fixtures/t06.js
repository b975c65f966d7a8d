function calculateResult() {
    var message;
    message = function () {
        return "Hello World";
    }();
    var number;
    number = function () {
        return 42;
    }();
    var isActive;
    isActive = function () {
        return true;
    }();
    console.log(message);
    return number + 1;
}
calculateResult();
