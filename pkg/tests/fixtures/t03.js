function calculateResult() {
    var message = atob("SGVsbG8gV29ybGQ=");
    var number = 42;
    var isActive = true;
    console.log(message);
    return number + 1;
}
calculateResult();
