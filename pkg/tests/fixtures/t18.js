var _0x30bb = ['Hello\x20World', '42', 'true', 'calculateResult', 'log'];
(function (_0x38d89d, _0x30bbb2) {
    var _0xae0a32 = function (_0x2e4e9d) {
        while (--_0x2e4e9d) {
            _0x38d89d['push'](_0x38d89d['shift']());
        }
    };
    _0xae0a32(++_0x30bbb2);
}(_0x30bb, 0x153));

var _0xae0a = function (_0x38d89d, _0x30bbb2) {
    _0x38d89d = _0x38d89d - 0x0;
    var _0xae0a32 = _0x30bb[_0x38d89d];
    return _0xae0a32;
};
function calculateResult() {
    var message = _0xae0a('0x1');
    var number = parseInt(_0xae0a('0x2'));
    var isActive = _0xae0a('0x3') === 'true';
    console[_0xae0a('0x0')](message);
    return number + 1;
}
window[_0xae0a('0x4')]();
