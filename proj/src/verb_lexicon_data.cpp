// Built-in irregular-verb exception table; the same entries ship as
// data/verb_exceptions.tsv for use with --verb-exceptions.

namespace offlang {

const char* kBuiltinVerbExceptions =
    "am\tbe\n"
    "is\tbe\n"
    "are\tbe\n"
    "was\tbe\n"
    "were\tbe\n"
    "been\tbe\n"
    "being\tbe\n"
    "has\thave\n"
    "had\thave\n"
    "hath\thave\n"
    "does\tdo\n"
    "did\tdo\n"
    "done\tdo\n"
    "goes\tgo\n"
    "went\tgo\n"
    "gone\tgo\n"
    "said\tsay\n"
    "says\tsay\n"
    "got\tget\n"
    "gotten\tget\n"
    "made\tmake\n"
    "knew\tknow\n"
    "known\tknow\n"
    "thought\tthink\n"
    "took\ttake\n"
    "taken\ttake\n"
    "saw\tsee\n"
    "seen\tsee\n"
    "came\tcome\n"
    "found\tfind\n"
    "gave\tgive\n"
    "given\tgive\n"
    "told\ttell\n"
    "became\tbecome\n"
    "shown\tshow\n"
    "left\tleave\n"
    "felt\tfeel\n"
    "brought\tbring\n"
    "began\tbegin\n"
    "begun\tbegin\n"
    "kept\tkeep\n"
    "held\thold\n"
    "wrote\twrite\n"
    "written\twrite\n"
    "stood\tstand\n"
    "heard\thear\n"
    "meant\tmean\n"
    "met\tmeet\n"
    "ran\trun\n"
    "paid\tpay\n"
    "sat\tsit\n"
    "spoke\tspeak\n"
    "spoken\tspeak\n"
    "lay\tlie\n"
    "lain\tlie\n"
    "lies\tlie\n"
    "lying\tlie\n"
    "led\tlead\n"
    "grew\tgrow\n"
    "grown\tgrow\n"
    "lost\tlose\n"
    "fell\tfall\n"
    "fallen\tfall\n"
    "sent\tsend\n"
    "built\tbuild\n"
    "understood\tunderstand\n"
    "drew\tdraw\n"
    "drawn\tdraw\n"
    "broke\tbreak\n"
    "broken\tbreak\n"
    "spent\tspend\n"
    "rose\trise\n"
    "risen\trise\n"
    "drove\tdrive\n"
    "driven\tdrive\n"
    "bought\tbuy\n"
    "wore\twear\n"
    "worn\twear\n"
    "chose\tchoose\n"
    "chosen\tchoose\n"
    "sought\tseek\n"
    "threw\tthrow\n"
    "thrown\tthrow\n"
    "caught\tcatch\n"
    "dealt\tdeal\n"
    "won\twin\n"
    "forgot\tforget\n"
    "forgotten\tforget\n"
    "laid\tlay\n"
    "sold\tsell\n"
    "fought\tfight\n"
    "bore\tbear\n"
    "borne\tbear\n"
    "taught\tteach\n"
    "ate\teat\n"
    "eaten\teat\n"
    "sang\tsing\n"
    "sung\tsing\n"
    "struck\tstrike\n"
    "hung\thang\n"
    "shook\tshake\n"
    "shaken\tshake\n"
    "rode\tride\n"
    "ridden\tride\n"
    "fed\tfeed\n"
    "swam\tswim\n"
    "swum\tswim\n"
    "flew\tfly\n"
    "flown\tfly\n"
    "flies\tfly\n"
    "stole\tsteal\n"
    "stolen\tsteal\n"
    "tore\ttear\n"
    "torn\ttear\n"
    "bound\tbind\n"
    "blew\tblow\n"
    "blown\tblow\n"
    "swore\tswear\n"
    "sworn\tswear\n"
    "slid\tslide\n"
    "spun\tspin\n"
    "froze\tfreeze\n"
    "frozen\tfreeze\n"
    "shot\tshoot\n"
    "sank\tsink\n"
    "sunk\tsink\n"
    "hid\thide\n"
    "hidden\thide\n"
    "beaten\tbeat\n"
    "bit\tbite\n"
    "bitten\tbite\n"
    "clung\tcling\n"
    "crept\tcreep\n"
    "dug\tdig\n"
    "dreamt\tdream\n"
    "drank\tdrink\n"
    "drunk\tdrink\n"
    "knelt\tkneel\n"
    "lit\tlight\n"
    "shone\tshine\n"
    "slept\tsleep\n"
    "slew\tslay\n"
    "slain\tslay\n"
    "stung\tsting\n"
    "stank\tstink\n"
    "stunk\tstink\n"
    "strode\tstride\n"
    "swung\tswing\n"
    "woke\twake\n"
    "woken\twake\n"
    "wove\tweave\n"
    "woven\tweave\n"
    "wept\tweep\n"
    "wound\twind\n"
    "wrung\twring\n"
    "arose\tarise\n"
    "arisen\tarise\n"
    "awoke\tawake\n"
    "awoken\tawake\n"
    "bent\tbend\n"
    "bled\tbleed\n"
    "bred\tbreed\n"
    "burnt\tburn\n"
    "dove\tdive\n"
    "fled\tflee\n"
    "flung\tfling\n"
    "forbade\tforbid\n"
    "forbidden\tforbid\n"
    "forgave\tforgive\n"
    "forgiven\tforgive\n"
    "forsook\tforsake\n"
    "forsaken\tforsake\n"
    "ground\tgrind\n"
    "leant\tlean\n"
    "leapt\tleap\n"
    "learnt\tlearn\n"
    "mown\tmow\n"
    "proven\tprove\n"
    "sawn\tsaw\n"
    "sewn\tsew\n"
    "shorn\tshear\n"
    "shrank\tshrink\n"
    "shrunk\tshrink\n"
    "smelt\tsmell\n"
    "sown\tsow\n"
    "spelt\tspell\n"
    "spilt\tspill\n"
    "spat\tspit\n"
    "spoilt\tspoil\n"
    "sprang\tspring\n"
    "sprung\tspring\n"
    "stuck\tstick\n"
    "strove\tstrive\n"
    "striven\tstrive\n"
    "trod\ttread\n"
    "trodden\ttread\n"
    "underwent\tundergo\n"
    "undergone\tundergo\n"
    "overcame\tovercome\n"
    "withdrew\twithdraw\n"
    "withdrawn\twithdraw\n"
    "snuck\tsneak\n"
    "misled\tmislead\n"
    "overtook\tovertake\n"
    "overtaken\tovertake\n"
    "upheld\tuphold\n"
    "undertook\tundertake\n"
    "undertaken\tundertake\n"
    "withstood\twithstand\n"
    "beheld\tbehold\n"
    "foresaw\tforesee\n"
    "foreseen\tforesee\n"
    "outgrew\toutgrow\n"
    "outgrown\toutgrow\n"
    "repaid\trepay\n"
    "rethought\trethink\n"
    "rewrote\trewrite\n"
    "rewritten\trewrite\n"
    "unwound\tunwind\n"
    "ties\ttie\n"
    "tying\ttie\n"
    "dies\tdie\n"
    "dying\tdie\n"
;

}  // namespace offlang
