//! Sentiment corpus extraction.
//!
//! Every `<phrase>` element yields one example. Its label is the text of a
//! `<sentiment>` element under the same parent: the first unclaimed one after
//! the phrase and before the next phrase, or failing that the nearest
//! unclaimed one before it and after the previous phrase. Context comes from a
//! `<context>` sibling, or else from the parent's own text outside any child
//! element.

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::LabeledExample;
use crate::corpus_filter::normalize_whitespace;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct XmlExtraction {
    pub examples: Vec<LabeledExample>,
    /// Phrases skipped for lacking a sentiment.
    pub warnings: usize,
}

#[derive(Debug, Default)]
struct Element {
    name: String,
    children: Vec<Node>,
}

#[derive(Debug)]
enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    fn is(&self, name: &str) -> bool {
        self.name.eq_ignore_ascii_case(name)
    }

    fn text(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => e.collect_text(out),
            }
        }
    }

    fn own_text(&self) -> String {
        let parts: Vec<&str> = self
            .children
            .iter()
            .filter_map(|c| match c {
                Node::Text(t) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect();
        normalize_whitespace(&parts.join(" "))
    }
}

pub fn extract_sentiment_xml(document: &str) -> Result<XmlExtraction> {
    let root = parse(document)?;
    let mut out = XmlExtraction::default();
    visit(&root, &mut out);
    for (i, example) in out.examples.iter_mut().enumerate() {
        example.id = i.to_string();
    }
    Ok(out)
}

fn visit(parent: &Element, out: &mut XmlExtraction) {
    let children: Vec<&Element> = parent
        .children
        .iter()
        .filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
        .collect();
    let phrases: Vec<usize> = (0..children.len()).filter(|&i| children[i].is("phrase")).collect();

    if !phrases.is_empty() {
        let context = children
            .iter()
            .find(|e| e.is("context"))
            .map(|e| normalize_whitespace(&e.text()))
            .unwrap_or_else(|| parent.own_text());
        let context = (!context.is_empty()).then_some(context);

        let mut claimed = vec![false; children.len()];
        for (k, &p) in phrases.iter().enumerate() {
            let next = phrases.get(k + 1).copied().unwrap_or(children.len());
            let prev = if k == 0 { 0 } else { phrases[k - 1] + 1 };
            let is_free = |i: &usize| children[*i].is("sentiment") && !claimed[*i];
            let found = (p + 1..next)
                .find(is_free)
                .or_else(|| (prev..p).rev().find(is_free));
            match found {
                Some(s) => {
                    claimed[s] = true;
                    out.examples.push(LabeledExample {
                        id: String::new(),
                        text: children[p].text(),
                        label: children[s].text().trim().to_uppercase(),
                        context: context.clone(),
                    });
                }
                None => out.warnings += 1,
            }
        }
    }

    for child in children {
        if !child.is("phrase") && !child.is("sentiment") && !child.is("context") {
            visit(child, out);
        }
    }
}

fn parse(document: &str) -> Result<Element> {
    let mut reader = Reader::from_str(document);
    let mut stack = vec![Element::default()];
    let malformed = |reader: &Reader<&[u8]>, message: String| Error::Xml {
        offset: reader.error_position(),
        message,
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(&reader, e.to_string()))?;
        match event {
            Event::Start(start) => stack.push(Element {
                name: start.local_name().as_ref().to_string(),
                children: Vec::new(),
            }),
            Event::Empty(start) => push_child(
                &mut stack,
                Node::Element(Element {
                    name: start.local_name().as_ref().to_string(),
                    children: Vec::new(),
                }),
            ),
            Event::End(_) => {
                if stack.len() < 2 {
                    return Err(malformed(&reader, "unexpected closing tag".into()));
                }
                let done = stack.pop().expect("non-empty stack");
                push_child(&mut stack, Node::Element(done));
            }
            Event::Text(text) => push_text(&mut stack, &text.xml10_content()),
            Event::CData(data) => push_text(&mut stack, &data.xml10_content()),
            Event::GeneralRef(reference) => {
                let resolved = match reference.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    Ok(None) => {
                        let name = reference.xml10_content();
                        resolve_predefined_entity(&name)
                            .ok_or_else(|| malformed(&reader, format!("unknown entity &{name};")))?
                            .to_string()
                    }
                    Err(e) => return Err(malformed(&reader, e.to_string())),
                };
                push_text(&mut stack, &resolved);
            }
            Event::Eof => break,
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }

    if stack.len() != 1 {
        let open = &stack.last().expect("non-empty stack").name;
        return Err(Error::Xml {
            offset: reader.buffer_position(),
            message: format!("unclosed element <{open}>"),
        });
    }
    Ok(stack.pop().expect("document root"))
}

fn push_child(stack: &mut [Element], node: Node) {
    stack.last_mut().expect("non-empty stack").children.push(node);
}

fn push_text(stack: &mut [Element], text: &str) {
    let children = &mut stack.last_mut().expect("non-empty stack").children;
    if let Some(Node::Text(last)) = children.last_mut() {
        last.push_str(text);
    } else {
        children.push(Node::Text(text.to_string()));
    }
}
