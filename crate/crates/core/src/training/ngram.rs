//! Character n-gram chemical language model with Laplace smoothing.
//!
//! Strings are framed by a begin marker `^` (only ever seen as context) and
//! an end marker `$`. Each row of the transition table covers the training
//! alphabet, the end marker and one out-of-vocabulary slot, so held-out
//! text with unseen characters still has finite perplexity. Sampling never
//! emits the out-of-vocabulary slot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng;

use super::TrainingError;

pub const BEGIN: char = '^';
pub const END: char = '$';
/// Model file written into artifact directories.
pub const MODEL_FILE: &str = "ngram_model.tsv";

const FORMAT_TAG: &str = "ngram_clm/1";
const DEFAULT_SYMBOL: &str = "*";

#[derive(Debug, Clone, PartialEq)]
struct Row {
    /// Probabilities of observed continuations; `END` stands for the end marker.
    probs: BTreeMap<char, f64>,
    /// Probability of every other symbol, including the unknown slot.
    default: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    alpha: f64,
    alphabet: Vec<char>,
    rows: BTreeMap<String, Row>,
}

/// Symbol of a full row distribution: a character, the end marker, or the
/// out-of-vocabulary slot (`None`).
pub type Symbol = Option<char>;

impl NgramModel {
    /// Counts transitions over `lines`. Callers guarantee the lines are free
    /// of the framing markers and of `*`.
    pub fn train<S: AsRef<str>>(lines: &[S], order: usize, alpha: f64) -> NgramModel {
        assert!((1..=5).contains(&order), "order out of range");
        assert!(alpha > 0.0, "alpha must be positive");
        let mut alphabet = BTreeSet::new();
        let mut counts: BTreeMap<String, BTreeMap<char, u64>> = BTreeMap::new();
        for line in lines {
            let chars: Vec<char> = line.as_ref().chars().collect();
            alphabet.extend(chars.iter().copied());
            let mut history = vec![BEGIN];
            for sym in chars.iter().copied().chain(std::iter::once(END)) {
                for len in 1..=order.min(history.len()) {
                    let ctx: String = history[history.len() - len..].iter().collect();
                    *counts.entry(ctx).or_default().entry(sym).or_default() += 1;
                }
                history.push(sym);
            }
        }
        let alphabet: Vec<char> = alphabet.into_iter().collect();
        // alphabet + end marker + unknown slot
        let slots = (alphabet.len() + 2) as f64;
        let rows = counts
            .into_iter()
            .map(|(ctx, row)| {
                let total: u64 = row.values().sum();
                let denom = total as f64 + alpha * slots;
                let probs = row
                    .into_iter()
                    .map(|(sym, c)| (sym, (c as f64 + alpha) / denom))
                    .collect();
                (ctx, Row { probs, default: alpha / denom })
            })
            .collect();
        let model = NgramModel {
            order,
            alpha,
            alphabet,
            rows,
        };
        // the in-memory model is exactly what a reload would produce
        NgramModel::from_text(&model.to_text()).expect("serialized model reparses")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn contexts(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// The full distribution of one context row over every character of
    /// the alphabet, the end marker and the unknown slot.
    pub fn distribution(&self, context: &str) -> Option<Vec<(Symbol, f64)>> {
        let row = self.rows.get(context)?;
        let mut out: Vec<(Symbol, f64)> = self
            .alphabet
            .iter()
            .chain(std::iter::once(&END))
            .map(|&c| (Some(c), row.probs.get(&c).copied().unwrap_or(row.default)))
            .collect();
        out.push((None, row.default));
        Some(out)
    }

    /// Longest suffix of `history` (at most `order` characters) with a row.
    fn row_for(&self, history: &[char]) -> Option<&Row> {
        (1..=self.order.min(history.len())).rev().find_map(|len| {
            let ctx: String = history[history.len() - len..].iter().collect();
            self.rows.get(&ctx)
        })
    }

    fn slots(&self) -> f64 {
        (self.alphabet.len() + 2) as f64
    }

    /// Probability of `sym` following `history`; unknown characters take
    /// the unknown slot's share.
    fn prob(&self, history: &[char], sym: char) -> f64 {
        match self.row_for(history) {
            Some(row) => row.probs.get(&sym).copied().unwrap_or(row.default),
            None => 1.0 / self.slots(),
        }
    }

    /// Draws one string, stopping at the end marker or after `max_length`
    /// characters. The output is not guaranteed to be valid SMILES.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_length: usize) -> String {
        let mut history = vec![BEGIN];
        let mut out = String::new();
        let symbols: Vec<char> = self.alphabet.iter().copied().chain(std::iter::once(END)).collect();
        while out.chars().count() < max_length {
            let weights: Vec<f64> = match self.row_for(&history) {
                Some(row) => symbols
                    .iter()
                    .map(|c| row.probs.get(c).copied().unwrap_or(row.default))
                    .collect(),
                None => vec![1.0; symbols.len()],
            };
            let total: f64 = weights.iter().sum();
            let mut u = rng.random::<f64>() * total;
            let mut pick = symbols[symbols.len() - 1];
            for (&c, &w) in symbols.iter().zip(&weights) {
                if u < w {
                    pick = c;
                    break;
                }
                u -= w;
            }
            if pick == END {
                break;
            }
            out.push(pick);
            history.push(pick);
        }
        out
    }

    /// exp of the mean negative log-probability per symbol, end marker
    /// included.
    pub fn perplexity<S: AsRef<str>>(&self, held_out: &[S]) -> Result<f64, TrainingError> {
        if held_out.is_empty() {
            return Err(TrainingError::EmptyValidationSet);
        }
        let mut nll = 0.0;
        let mut events = 0usize;
        for line in held_out {
            let mut history = vec![BEGIN];
            for sym in line.as_ref().chars().chain(std::iter::once(END)) {
                nll -= self.prob(&history, sym).ln();
                events += 1;
                history.push(sym);
            }
        }
        Ok((nll / events as f64).exp())
    }

    /// Canonical text form: header lines, then one `context<TAB>symbol<TAB>p`
    /// line per observed transition and a `*` line with the shared
    /// probability of the rest. Contexts are sorted and probabilities use 12
    /// mantissa decimals in scientific notation, so tiny smoothed values
    /// survive a reload.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "format\t{FORMAT_TAG}").unwrap();
        writeln!(s, "order\t{}", self.order).unwrap();
        writeln!(s, "alpha\t{:.12e}", self.alpha).unwrap();
        writeln!(s, "alphabet\t{}", self.alphabet.iter().collect::<String>()).unwrap();
        for (ctx, row) in &self.rows {
            for (sym, p) in &row.probs {
                writeln!(s, "{ctx}\t{sym}\t{p:.12e}").unwrap();
            }
            writeln!(s, "{ctx}\t{DEFAULT_SYMBOL}\t{:.12e}", row.default).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<NgramModel, TrainingError> {
        let bad = |line: usize, reason: &str| TrainingError::InvalidModel(format!("line {line}: {reason}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<String, TrainingError> {
            let (n, l) = lines.next().ok_or_else(|| bad(0, "truncated header"))?;
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .map(str::to_string)
                .ok_or_else(|| bad(n, &format!("expected {key}")))
        };
        if header("format")? != FORMAT_TAG {
            return Err(bad(1, "unsupported format"));
        }
        let order: usize = header("order")?.parse().map_err(|_| bad(2, "bad order"))?;
        let alpha: f64 = header("alpha")?.parse().map_err(|_| bad(3, "bad alpha"))?;
        let alphabet: Vec<char> = header("alphabet")?.chars().collect();
        if !(1..=5).contains(&order) || alpha.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(bad(2, "order or alpha out of range"));
        }
        let mut rows: BTreeMap<String, Row> = BTreeMap::new();
        for (n, l) in lines {
            let mut cols = l.split('\t');
            let (Some(ctx), Some(sym), Some(p), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad(n, "expected 3 columns"));
            };
            let p: f64 = p.parse().map_err(|_| bad(n, "bad probability"))?;
            let row = rows.entry(ctx.to_string()).or_insert(Row {
                probs: BTreeMap::new(),
                default: f64::NAN,
            });
            let mut chars = sym.chars();
            match (sym, chars.next(), chars.next()) {
                (DEFAULT_SYMBOL, _, _) => row.default = p,
                (_, Some(c), None) => {
                    row.probs.insert(c, p);
                }
                _ => return Err(bad(n, "bad symbol")),
            }
        }
        if rows.values().any(|r| r.default.is_nan()) {
            return Err(bad(0, "row without default probability"));
        }
        Ok(NgramModel {
            order,
            alpha,
            alphabet,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn row_sum(m: &NgramModel, ctx: &str) -> f64 {
        m.distribution(ctx).unwrap().iter().map(|(_, p)| p).sum()
    }

    #[test]
    fn hand_counted_transitions() {
        let m = NgramModel::train(&["CC", "CC"], 1, 1e-12);
        let p = |ctx: &str, sym: Symbol| {
            m.distribution(ctx)
                .unwrap()
                .into_iter()
                .find(|(s, _)| *s == sym)
                .unwrap()
                .1
        };
        assert!((p("^", Some('C')) - 1.0).abs() < 1e-9);
        assert!((p("C", Some('C')) - 0.5).abs() < 1e-9);
        assert!((p("C", Some(END)) - 0.5).abs() < 1e-9);
        let ctxs: Vec<&str> = m.contexts().collect();
        assert_eq!(ctxs, vec!["C", "^"]);
    }

    #[test]
    fn hand_perplexity() {
        let m = NgramModel::train(&["CC"], 1, 1e-12);
        // events: C|^ = 1, C|C = 1/2, $|C = 1/2
        let expected = (2.0f64 * 2.0f64.ln() / 3.0).exp();
        assert!((m.perplexity(&["CC"]).unwrap() - expected).abs() < 1e-9);
        assert!(m.perplexity::<&str>(&[]).is_err());
    }

    #[test]
    fn unseen_characters_have_finite_perplexity() {
        let m = NgramModel::train(&["CCO", "c1ccccc1"], 3, 0.01);
        let p = m.perplexity(&["CCBr", "N#N"]).unwrap();
        assert!(p.is_finite() && p >= 1.0);
    }

    #[test]
    fn rows_are_normalized_and_positive() {
        let m = NgramModel::train(&["CC(=O)O", "c1ccccc1", "CCN(CC)CC"], 3, 0.01);
        for ctx in m.contexts() {
            assert!((row_sum(&m, ctx) - 1.0).abs() < 1e-9, "{ctx}");
            assert!(m.distribution(ctx).unwrap().iter().all(|(_, p)| *p > 0.0));
        }
    }

    #[test]
    fn single_path_model_samples_its_corpus() {
        // order 2 separates "^C" from "CC"; order 1 would share context "C"
        let m = NgramModel::train(&["CC"], 2, 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert_eq!(m.sample(&mut rng, 100), "CC");
        }
        let m = NgramModel::train(&["CC"], 1, 1e-12);
        for _ in 0..50 {
            let s = m.sample(&mut rng, 100);
            assert!(!s.is_empty() && s.chars().all(|c| c == 'C'));
        }
    }

    #[test]
    fn sampling_is_bounded_and_deterministic() {
        let m = NgramModel::train(&["CCO", "CCCCCCCC", "OCCO"], 2, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(m.sample(&mut rng, 1).chars().count() <= 1);
        }
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| m.sample(&mut rng, 40)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn text_round_trip() {
        let m = NgramModel::train(&["CC(=O)O", "c1ccncc1"], 3, 0.01);
        let text = m.to_text();
        let back = NgramModel::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
        assert!(NgramModel::from_text("format\tother\n").is_err());
    }
}
