//! Metric reference computed straight from (gold, predicted) pairs.

/// `(precision, recall, f1)` per class in `labels` order, as fractions.
/// `None` predictions are unparseable outputs.
pub fn per_class(labels: &[&str], pairs: &[(&str, Option<&str>)]) -> Vec<(f64, f64, f64)> {
    labels
        .iter()
        .map(|&c| {
            let tp = pairs.iter().filter(|(g, p)| *g == c && *p == Some(c)).count() as f64;
            let predicted = pairs.iter().filter(|(_, p)| *p == Some(c)).count() as f64;
            let support = pairs.iter().filter(|(g, _)| *g == c).count() as f64;
            let p = if predicted > 0.0 { tp / predicted } else { 0.0 };
            let r = if support > 0.0 { tp / support } else { 0.0 };
            let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            (p, r, f)
        })
        .collect()
}

/// Unweighted mean over classes that occur in gold, scaled to percent.
pub fn macro_percent(labels: &[&str], pairs: &[(&str, Option<&str>)]) -> (f64, f64, f64) {
    let rows = per_class(labels, pairs);
    let present: Vec<usize> = (0..labels.len())
        .filter(|&i| pairs.iter().any(|(g, _)| *g == labels[i]))
        .collect();
    let k = present.len() as f64;
    let mean = |f: fn(&(f64, f64, f64)) -> f64| 100.0 * present.iter().map(|&i| f(&rows[i])).sum::<f64>() / k;
    (mean(|t| t.0), mean(|t| t.1), mean(|t| t.2))
}

/// Support-weighted mean, scaled to percent.
pub fn weighted_percent(labels: &[&str], pairs: &[(&str, Option<&str>)]) -> (f64, f64, f64) {
    let rows = per_class(labels, pairs);
    let n = pairs.len() as f64;
    let w: Vec<f64> = labels
        .iter()
        .map(|&c| pairs.iter().filter(|(g, _)| *g == c).count() as f64 / n)
        .collect();
    let mean = |f: fn(&(f64, f64, f64)) -> f64| 100.0 * rows.iter().zip(&w).map(|(r, w)| w * f(r)).sum::<f64>();
    (mean(|t| t.0), mean(|t| t.1), mean(|t| t.2))
}
