//! Decimal digits of pi, integer part included: 3, 1, 4, 1, 5, 9, ...

/// 4096 digits, 64 per line.
pub(crate) const PI_DIGITS: &str = concat!(
    "3141592653589793238462643383279502884197169399375105820974944592",
    "3078164062862089986280348253421170679821480865132823066470938446",
    "0955058223172535940812848111745028410270193852110555964462294895",
    "4930381964428810975665933446128475648233786783165271201909145648",
    "5669234603486104543266482133936072602491412737245870066063155881",
    "7488152092096282925409171536436789259036001133053054882046652138",
    "4146951941511609433057270365759591953092186117381932611793105118",
    "5480744623799627495673518857527248912279381830119491298336733624",
    "4065664308602139494639522473719070217986094370277053921717629317",
    "6752384674818467669405132000568127145263560827785771342757789609",
    "1736371787214684409012249534301465495853710507922796892589235420",
    "1995611212902196086403441815981362977477130996051870721134999999",
    "8372978049951059731732816096318595024459455346908302642522308253",
    "3446850352619311881710100031378387528865875332083814206171776691",
    "4730359825349042875546873115956286388235378759375195778185778053",
    "2171226806613001927876611195909216420198938095257201065485863278",
    "8659361533818279682303019520353018529689957736225994138912497217",
    "7528347913151557485724245415069595082953311686172785588907509838",
    "1754637464939319255060400927701671139009848824012858361603563707",
    "6601047101819429555961989467678374494482553797747268471040475346",
    "4620804668425906949129331367702898915210475216205696602405803815",
    "0193511253382430035587640247496473263914199272604269922796782354",
    "7816360093417216412199245863150302861829745557067498385054945885",
    "8692699569092721079750930295532116534498720275596023648066549911",
    "9881834797753566369807426542527862551818417574672890977772793800",
    "0816470600161452491921732172147723501414419735685481613611573525",
    "5213347574184946843852332390739414333454776241686251898356948556",
    "2099219222184272550254256887671790494601653466804988627232791786",
    "0857843838279679766814541009538837863609506800642251252051173929",
    "8489608412848862694560424196528502221066118630674427862203919494",
    "5047123713786960956364371917287467764657573962413890865832645995",
    "8133904780275900994657640789512694683983525957098258226205224894",
    "0772671947826848260147699090264013639443745530506820349625245174",
    "9399651431429809190659250937221696461515709858387410597885959772",
    "9754989301617539284681382686838689427741559918559252459539594310",
    "4997252468084598727364469584865383673622262609912460805124388439",
    "0451244136549762780797715691435997700129616089441694868555848406",
    "3534220722258284886481584560285060168427394522674676788952521385",
    "2254995466672782398645659611635488623057745649803559363456817432",
    "4112515076069479451096596094025228879710893145669136867228748940",
    "5601015033086179286809208747609178249385890097149096759852613655",
    "4978189312978482168299894872265880485756401427047755513237964145",
    "1523746234364542858444795265867821051141354735739523113427166102",
    "1359695362314429524849371871101457654035902799344037420073105785",
    "3906219838744780847848968332144571386875194350643021845319104848",
    "1005370614680674919278191197939952061419663428754440643745123718",
    "1921799983910159195618146751426912397489409071864942319615679452",
    "0809514655022523160388193014209376213785595663893778708303906979",
    "2077346722182562599661501421503068038447734549202605414665925201",
    "4974428507325186660021324340881907104863317346496514539057962685",
    "6100550810665879699816357473638405257145910289706414011097120628",
    "0439039759515677157700420337869936007230558763176359421873125147",
    "1205329281918261861258673215791984148488291644706095752706957220",
    "9175671167229109816909152801735067127485832228718352093539657251",
    "2108357915136988209144421006751033467110314126711136990865851639",
    "8315019701651511685171437657618351556508849099898599823873455283",
    "3163550764791853589322618548963213293308985706420467525907091548",
    "1416549859461637180270981994309924488957571282890592323326097299",
    "7120844335732654893823911932597463667305836041428138830320382490",
    "3758985243744170291327656180937734440307074692112019130203303801",
    "9762110110044929321516084244485963766983895228684783123552658213",
    "1449576857262433441893039686426243410773226978028073189154411010",
    "4468232527162010526522721116603966655730925471105578537634668206",
    "5310989652691862056476931257058635662018558100729360659876486117",
);
