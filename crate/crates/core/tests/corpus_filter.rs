mod support;

use std::time::Instant;

use lexforge::corpus_filter::io::CorpusReader;
use lexforge::corpus_filter::{dedup_exact, filter_corpus, filter_lines, FilterConfig, RawLine, RejectReason};
use support::corpora::mixed_corpus;

fn raw(lines: &[String]) -> Vec<RawLine> {
    lines
        .iter()
        .enumerate()
        .map(|(i, t)| RawLine::new(t.as_str(), "fixture", i as u64 + 1))
        .collect()
}

#[test]
fn thousand_line_corpus_is_conserved_and_idempotent() {
    let corpus = mixed_corpus(1, 1_000);
    let config = FilterConfig::default();
    let start = Instant::now();

    let (kept, report) = filter_lines(raw(&corpus), &config).unwrap();
    assert_eq!(report.total, 1_000);
    assert_eq!(report.kept + report.rejected(), report.total);
    assert_eq!(kept.len() as u64, report.kept);
    for reason in RejectReason::ALL {
        assert!(report.rejected_by_reason[&reason] > 0, "no {reason} rejects");
    }

    let texts: Vec<String> = kept.iter().map(|l| l.text.clone()).collect();
    let (again, second) = filter_lines(raw(&texts), &config).unwrap();
    assert_eq!(second.kept, second.total);
    assert_eq!(again.iter().map(|l| &l.text).collect::<Vec<_>>(), texts.iter().collect::<Vec<_>>());

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");
}

#[test]
fn file_with_broken_bytes_streams_through_filter_and_dedup() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("crawl.txt");
    let good = "අද මම ගෙදර යනවා පොත කියවනවා";
    let mut bytes = Vec::new();
    for line in [good, "hello world from the web", good, "1) අද කාලගුණය හොඳයි වැස්ස නැත"] {
        bytes.extend_from_slice(line.as_bytes());
        bytes.push(b'\n');
    }
    bytes.extend_from_slice(b"\xE0\xB6 broken \xFF\xFE\n");
    std::fs::write(&path, bytes).unwrap();

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    let report = filter_corpus(
        CorpusReader::open(&[&path]).unwrap().lines(),
        &FilterConfig::default(),
        |line| {
            kept.push(line);
            Ok(())
        },
        |line, reason| {
            rejected.push((line.line_number, reason));
            Ok(())
        },
    )
    .unwrap();
    assert_eq!(report.total, 5);
    assert_eq!(rejected, [(2, RejectReason::NonTargetScript), (5, RejectReason::Malformed)]);
    assert_eq!(kept[2].text, "අද කාලගුණය හොඳයි වැස්ස නැත");

    let mut unique = Vec::new();
    let dupes = dedup_exact(kept.into_iter().map(Ok), |line| {
        unique.push(line.line_number);
        Ok(())
    })
    .unwrap();
    assert_eq!(dupes, 1);
    assert_eq!(unique, [1, 4]);
}
