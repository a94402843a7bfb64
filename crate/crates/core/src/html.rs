//! Text extraction from raw HTML pages.
//!
//! The same element classes drive both word counting here and document
//! cleaning in the judging service, so text extracted from a cleaned page
//! matches text extracted from the original.

use ego_tree::NodeRef;
use scraper::{Html, Node};

/// Elements dropped together with everything inside them: document
/// metadata, scripts, styles, embedded objects and form controls.
pub const NON_CONTENT_ELEMENTS: &[&str] = &[
    "head", "title", "base", "meta", "link", "script", "style", "noscript", "template", "object",
    "embed", "applet", "param", "iframe", "frame", "frameset", "noframes", "svg", "math", "canvas",
    "audio", "video", "source", "track", "picture", "img", "map", "area", "input", "button",
    "select", "textarea", "datalist", "option", "optgroup",
];

/// Elements that break the flow of text. Words never continue across them.
pub const BLOCK_ELEMENTS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "caption", "center", "col",
    "colgroup", "dd", "details", "dialog", "dir", "div", "dl", "dt", "fieldset", "figcaption",
    "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr",
    "html", "legend", "li", "main", "menu", "nav", "ol", "p", "pre", "section", "summary", "table",
    "tbody", "td", "tfoot", "th", "thead", "tr", "ul",
];

pub fn is_non_content(name: &str) -> bool {
    NON_CONTENT_ELEMENTS.contains(&name)
}

pub fn is_block(name: &str) -> bool {
    BLOCK_ELEMENTS.contains(&name)
}

/// Visible body text of an HTML page, with a newline at every block
/// boundary.
pub fn extract_text(html: &str) -> String {
    let doc = Html::parse_document(html);
    let mut out = String::new();
    collect_text(doc.tree.root(), &mut out);
    out
}

/// Whitespace-token count of [`extract_text`].
pub fn word_count(html: &str) -> usize {
    extract_text(html).split_whitespace().count()
}

fn collect_text(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Text(text) => out.push_str(&text.text),
        Node::Element(el) => {
            let name = el.name();
            if is_non_content(name) {
                return;
            }
            let block = is_block(name);
            if block {
                out.push('\n');
            }
            for child in node.children() {
                collect_text(child, out);
            }
            if block {
                out.push('\n');
            }
        }
        Node::Document | Node::Fragment => {
            for child in node.children() {
                collect_text(child, out);
            }
        }
        _ => {}
    }
}
