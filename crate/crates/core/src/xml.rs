//! Small helpers shared by the XML readers and writers.

use std::borrow::Cow;
use std::path::Path;

use roxmltree::{Document, Node};

use crate::error::{Error, Result};

pub(crate) const DECLARATION: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

pub(crate) fn escape(s: &str) -> Cow<'_, str> {
    if !s.contains(['&', '<', '>', '"', '\'']) {
        return Cow::Borrowed(s);
    }
    let mut out = String::with_capacity(s.len() + 8);
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    Cow::Owned(out)
}

pub(crate) fn parse<'a>(file: &Path, text: &'a str) -> Result<Document<'a>> {
    Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::Document {
            file: file.to_path_buf(),
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })
}

pub(crate) fn error_at(file: &Path, node: Node<'_, '_>, message: impl Into<String>) -> Error {
    let pos = node.document().text_pos_at(node.range().start);
    Error::Document {
        file: file.to_path_buf(),
        line: pos.row,
        column: pos.col,
        message: message.into(),
    }
}

pub(crate) fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

pub(crate) fn expect_name(file: &Path, node: Node<'_, '_>, name: &str) -> Result<()> {
    if node.tag_name().name() == name {
        Ok(())
    } else {
        Err(error_at(
            file,
            node,
            format!(
                "expected element `{name}`, found `{}`",
                node.tag_name().name()
            ),
        ))
    }
}

pub(crate) fn attr<'a>(file: &Path, node: Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| {
        error_at(
            file,
            node,
            format!(
                "element `{}` is missing attribute `{name}`",
                node.tag_name().name()
            ),
        )
    })
}
