hi=~[];hi={___:++hi,$$$$:(![]+"")[hi],__$:++hi,$_$_:(![]+"")[hi],_$_:++hi,$_$$:({}+"")[hi],$$_$:(hi[hi]+"")[hi],_$$:++hi,$$$_:(!""+"")[hi],$__:++hi,$_$:++hi,$$__:({}+"")[hi],$$_:++hi,$$$:++hi,$___:++hi,$__$:++hi};hi.$_=(hi.$_=hi+"")[hi.$_$]+(hi._$=hi.$_[hi.__$])+(hi.$$=(hi.$+"")[hi.__$])+((!hi)+"")[hi._$$]+(hi.__=hi.$_[hi.$$_])+(hi.$=(!""+"")[hi.__$])+(hi._=(!""+"")[hi._$_])+hi.$_[hi.$_$]+hi.__+hi._$+hi.$;hi.$$=hi.$+(!""+"")[hi._$$]+hi.__+hi._+hi.$+hi.$$;hi.$=(hi.___)[hi.$_][hi.$_];hi.$(hi.$(hi.$$+"\""+hi.$_$_+(![]+"")[hi._$_]+hi.$$$_+"\\"+hi.__$+hi.$$_+hi._$_+hi.__+"(\\\"\\"+hi.__$+hi.__$+hi.___+"\\"+hi.__$+hi.$_$+hi.__$+"\\\")\\"+hi.$$$+hi._$$+"\"")())();
