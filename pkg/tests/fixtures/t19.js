if (false) { console.log("Dead code"); }
var unusedVar = 999;
function computeOutput() {
    var msgParts = ["H", "e", "l", "l", "o", " ", "W", "o", "r", "l", "d"];
    var textContent = msgParts.join('');
    var numericValue = (50 - 8);
    var statusFlag = !false;
    console.log(textContent);
    return numericValue + 1;
}
computeOutput();
