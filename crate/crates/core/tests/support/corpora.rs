//! Deterministic synthetic corpora.

use lexforge::dataset::{LabeledExample, SplitMix64};

pub const SINHALA_WORDS: &[&str] = &[
    "අද", "මම", "ගෙදර", "යනවා", "රජයේ", "නිවේදනයක්", "ප්‍රවෘත්ති", "ශ්‍රී", "ලංකාව", "පාසල",
    "ළමයින්", "හොඳයි", "නරකයි", "කාලගුණය", "වැස්ස", "අම්මා", "තාත්තා", "පොත", "කියවනවා",
    "ක්‍රීඩා", "ආර්ථිකය", "ජනාධිපති", "රූපවාහිනී", "ගීතය", "කණ්ඩායම",
];

pub const ENGLISH_WORDS: &[&str] = &[
    "the", "government", "announced", "today", "cricket", "match", "school", "weather",
    "report", "new", "policy", "people", "said", "will", "market",
];

pub const EMOJI: &[&str] = &["😀", "🇱🇰", "👍🏽", "❤️", "👨‍👩‍👧"];

pub struct Gen(pub SplitMix64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(SplitMix64::new(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.below(n)
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }

    pub fn words(&mut self, vocab: &[&str], min: usize, max: usize) -> String {
        let n = min + self.below(max - min + 1);
        (0..n).map(|_| *self.pick(vocab)).collect::<Vec<_>>().join(" ")
    }
}

/// One line of a web-crawl-like corpus: mostly Sinhala, with English,
/// URLs, list numbering, emoji, punctuation noise, fragments, broken bytes
/// and exact repeats of earlier lines.
pub fn mixed_line(g: &mut Gen, previous: &[String]) -> String {
    if !previous.is_empty() && g.chance(8) {
        return g.pick(previous).clone();
    }
    match g.below(20) {
        0..=8 => g.words(SINHALA_WORDS, 3, 12),
        9..=10 => g.words(ENGLISH_WORDS, 3, 10),
        11 => format!("{} https://news.example.lk/a/{} {}", g.words(SINHALA_WORDS, 2, 5), g.below(999), g.words(SINHALA_WORDS, 1, 4)),
        12 => format!("{}) {}", 1 + g.below(20), g.words(SINHALA_WORDS, 3, 8)),
        13 => format!("{} {}", g.words(SINHALA_WORDS, 3, 8), g.pick(EMOJI)),
        14 => format!("{} !!!!!! {}", g.words(SINHALA_WORDS, 2, 5), g.words(SINHALA_WORDS, 1, 3)),
        15 => g.pick(SINHALA_WORDS).to_string(),
        16 => format!("{} \u{FFFD} {}", g.words(SINHALA_WORDS, 2, 4), g.words(SINHALA_WORDS, 2, 4)),
        17 => format!("{} {}", g.words(SINHALA_WORDS, 2, 4), g.words(ENGLISH_WORDS, 4, 8)),
        18 => "   ".repeat(g.below(2)),
        _ => format!("  {}\t{}  ", g.words(SINHALA_WORDS, 2, 6), g.words(SINHALA_WORDS, 1, 3)),
    }
}

pub fn mixed_corpus(seed: u64, lines: usize) -> Vec<String> {
    let mut g = Gen::new(seed);
    let mut out: Vec<String> = Vec::with_capacity(lines);
    for _ in 0..lines {
        let line = mixed_line(&mut g, &out);
        out.push(line);
    }
    out
}

/// `n` Sinhala words drawn from [`SINHALA_WORDS`], ten per line.
pub fn sinhala_words_corpus(seed: u64, n: usize) -> Vec<String> {
    let mut g = Gen::new(seed);
    let words: Vec<&str> = (0..n).map(|_| *g.pick(SINHALA_WORDS)).collect();
    words.chunks(10).map(|c| c.join(" ")).collect()
}

/// Random UTF-8 string over Sinhala letters and signs, ZWJ/ZWNJ, emoji,
/// ASCII, whitespace and arbitrary scalar values.
pub fn random_text(g: &mut Gen, max_chars: usize) -> String {
    let n = g.below(max_chars + 1);
    let mut s = String::new();
    for _ in 0..n {
        let c = match g.below(10) {
            0..=3 => char::from_u32(0x0D80 + g.below(0x80) as u32),
            4 => Some(if g.chance(50) { '\u{200D}' } else { '\u{200C}' }),
            5 => char::from_u32(0x1F300 + g.below(0x300) as u32),
            6 => Some(*g.pick(&[' ', ' ', '\t', '\n', '\u{00A0}', '\u{3000}'])),
            7 => char::from_u32(0x20 + g.below(0x5F) as u32),
            8 => Some(*g.pick(&['\u{FE0F}', '\u{1F3FD}', '\u{0DCA}', '\u{0DDA}', '\\', '\0'])),
            _ => char::from_u32(g.below(0x11_0000) as u32),
        };
        if let Some(c) = c {
            s.push(c);
        }
    }
    s
}

/// Labeled examples with the given class sizes, texts unique.
pub fn labeled(classes: &[(&str, usize)]) -> Vec<LabeledExample> {
    let mut out = Vec::new();
    for (label, n) in classes {
        for _ in 0..*n {
            let id = out.len().to_string();
            out.push(LabeledExample::new(id.clone(), format!("වාක්‍යය {id}"), *label));
        }
    }
    out
}

/// Small corpus over a few symbols so that pair frequencies collide often.
pub fn small_alphabet_corpus(g: &mut Gen) -> Vec<String> {
    const ALPHABET: &[&str] = &["a", "b", "c", "ab", "ද", "අ", "\u{200D}"];
    let words = 1 + g.below(100);
    let mut lines = vec![String::new()];
    for _ in 0..words {
        let len = 1 + g.below(6);
        let word: String = (0..len).map(|_| *g.pick(ALPHABET)).collect();
        let line = lines.last_mut().unwrap();
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(&word);
        if g.chance(15) {
            lines.push(String::new());
        }
    }
    lines
}
