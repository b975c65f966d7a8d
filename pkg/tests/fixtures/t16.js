function calculateResult() {
    var _array = "1|0|3|2|4".split("|"),
    _index = 0;
    while (!![]) {
        switch (+_array[_index++]) {
        case 0:
            var number = 42;
            continue;
        case 1:
            var message = "Hello World";
            continue;
        case 2:
            console.log(message);
            continue;
        case 3:
            var isActive = true;
            continue;
        case 4:
            return number + 1;
            continue;
        }
        break;
    }
}
calculateResult();
