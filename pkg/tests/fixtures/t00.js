function _0x62ab7d() {
    var _0x3f4a8c = "Hello World";
    var _0x9b2e1f = 42;
    var _0x7c5d9a = true;
    console.log(_0x3f4a8c);
    return _0x9b2e1f + 1;
}
_0x62ab7d();
