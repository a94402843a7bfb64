use proptest::prelude::*;
use scraper::{Html, Node};
use trelkit::html::extract_text;
use trelkit_judge::clean_document;

const FORBIDDEN_ELEMENTS: &[&str] = &["script", "style", "object", "embed", "iframe", "link", "font", "img", "form"];

fn clean(s: &str) -> String {
    clean_document(s.as_bytes()).html
}

fn words(html: &str) -> Vec<String> {
    extract_text(html).split_whitespace().map(str::to_string).collect()
}

/// Elements and attributes of the cleaned output, as a browser would see them.
fn markup(html: &str) -> (Vec<String>, Vec<String>) {
    let doc = Html::parse_fragment(html);
    let mut elements = Vec::new();
    let mut attrs = Vec::new();
    for node in doc.tree.root().descendants() {
        if let Node::Element(e) = node.value() {
            elements.push(e.name().to_string());
            attrs.extend(e.attrs().map(|(k, _)| k.to_string()));
        }
    }
    (elements, attrs)
}

fn assert_contract(input: &str) {
    let out = clean(input);
    let (elements, attrs) = markup(&out);
    for f in FORBIDDEN_ELEMENTS {
        assert!(!elements.iter().any(|e| e == f), "<{f}> survived in {out}");
    }
    for a in &attrs {
        assert!(["href", "colspan", "rowspan"].contains(&a.as_str()), "attribute {a} survived in {out}");
    }
    assert_eq!(words(input), words(&out), "text changed for {input:?}");
    assert_eq!(clean(&out), out, "not idempotent for {input:?}");
}

const CORPUS: &[&str] = &[
    r##"<!DOCTYPE html><html><head><title>Gold</title>
       <link rel="stylesheet" href="site.css"><style>body{background:#000;color:#ff0}</style>
       <script src="tracker.js"></script></head>
       <body bgcolor="#000000" text="#ffff00" onload="init()">
       <div id="nav" class="menu" style="float:left"><a href="/">Home</a> | <a href="javascript:void(0)">Menu</a></div>
       <h1 style="color:gold">Gold units</h1>
       <p><font color="red" size="5">Troy ounce</font> is the usual unit for <b>gold</b>.</p>
       <table bgcolor="silver" width="80%"><tr><th>Unit</th><th>Grams</th></tr>
       <tr><td bgcolor="yellow">troy ounce</td><td align="right">31.1</td></tr></table>
       <object data="movie.swf"><embed src="movie.swf"></object>
       <iframe src="ads.html">fallback ads text</iframe>
       <form action="/s"><input name="q" value="search me"><button>Go</button></form>
       <noscript>enable scripts</noscript>
       </body></html>"##,
    "<p>one<p>two<ul><li>three<li>four</ul><p>five</p>",
    "<center><marquee>moving text</marquee></center><blink>old</blink>",
    "<pre>  code\n    indented\n</pre><pre>\n\nleading blank</pre>",
    "<table><tr><td>a<table><tr><td>nested</td></tr></table></td></tr></table>",
    "<p>x<table><tr><td>foster</td></tr></table>y</p>",
    "<div><span style='color:red'>a</span>b<i>c</i>d&nbsp;e</div>",
    "<a href='http://x.org/a?b=1&amp;c=\"2\"'>quote &amp; amp</a>",
    "<dl><dt>term<dd>definition</dl><address>addr</address>",
    "<h2>unclosed <em>emphasis<h3>next",
    "<svg><text>drawn words</text></svg><math><mi>x</mi></math> after",
    "<xmp><b>raw</b></xmp><listing>\nlisting</listing>",
    "<body><!-- comment --><p>text</p></body>",
    "just plain text\n\n   with lines",
    "a < b and c > d & e",
    "",
    "<video><source src=v.mp4>video fallback</video><audio>audio fallback</audio>",
    "<details><summary>sum</summary>hidden</details><figure><figcaption>cap</figcaption></figure>",
    "<a href=x><a href=y>double</a></a><a>no href</a>",
    "<table><caption>cap</caption><colgroup><col span=2></colgroup><thead><tr><th colspan=2 rowspan=99999>h</th></tr></thead><tfoot><tr><td>f</td></tr></tfoot></table>",
];

#[test]
fn fixture_corpus_meets_contract() {
    for input in CORPUS {
        assert_contract(input);
    }
}

#[test]
fn stylesheet_page_keeps_structure() {
    let out = clean(CORPUS[0]);
    assert!(out.contains("<h1>Gold units</h1>"));
    assert!(out.contains(r#"<a href="/">Home</a>"#));
    assert!(out.contains("<th>Unit</th>"));
    assert!(!out.contains("Menu</a>"));
    for gone in ["ads text", "search me", "enable scripts", "tracker", "background"] {
        assert!(!out.contains(gone), "{gone}");
    }
}

fn tag_soup() -> impl Strategy<Value = String> {
    let tag = prop::sample::select(vec![
        "p", "div", "span", "b", "a", "table", "tr", "td", "li", "ul", "pre", "script", "style", "font",
        "center", "h1", "br", "hr", "iframe", "object", "form", "input", "xmp", "em", "blockquote",
        "tbody", "th", "dl", "dd", "caption", "nav", "select", "option", "svg", "noscript", "textarea",
    ]);
    let attr = prop::sample::select(vec![
        "", " style=\"color:red\"", " href=\"http://x\"", " href=\"javascript:x\"", " onclick=\"f()\"",
        " colspan=\"2\"", " class=\"c\"", " color=\"red\"",
    ]);
    let piece = prop_oneof![
        (tag.clone(), attr).prop_map(|(t, a)| format!("<{t}{a}>")),
        tag.prop_map(|t| format!("</{t}>")),
        "[a-z]{1,6}".prop_map(|w| format!("{w} ")),
        prop::sample::select(vec!["\n", "  ", "&amp;", "&lt;", "&nbsp;", "<!-- c -->", "\u{e9}", "<"])
            .prop_map(str::to_string),
    ];
    let doctype = prop::sample::select(vec!["", "<!DOCTYPE html>"]);
    (doctype, prop::collection::vec(piece, 0..40)).prop_map(|(d, v)| format!("{d}{}", v.concat()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn random_markup_meets_contract(input in tag_soup()) {
        let out = clean(&input);
        prop_assert_eq!(clean(&out), out.clone());
        let (elements, attrs) = markup(&out);
        for f in FORBIDDEN_ELEMENTS {
            prop_assert!(!elements.iter().any(|e| e == f));
        }
        prop_assert!(attrs.iter().all(|a| ["href", "colspan", "rowspan"].contains(&a.as_str())));
        prop_assert_eq!(words(&input), words(&out));
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let once = clean_document(&bytes);
        prop_assert_eq!(once.lossy, std::str::from_utf8(&bytes).is_err());
        prop_assert_eq!(clean(&once.html), once.html);
    }
}
