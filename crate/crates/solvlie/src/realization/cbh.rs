//! Campbell-Baker-Hausdorff products on nilpotent algebras via the Dynkin
//! commutator series.
//!
//! On a nilpotent algebra of class c every nested commutator of degree > c
//! vanishes, so truncating the series at total degree c gives the exact
//! group product up to floating-point rounding. The coefficient table is
//! generated once for the maximal supported class and cached.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Largest nilpotency class for which the coefficient table is generated.
pub const MAX_CLASS: usize = 6;

struct Term {
    coeff: f64,
    /// 0 = first argument, 1 = second argument; bracket is right-nested.
    word: Vec<u8>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn push_term(blocks: &[(usize, usize)], out: &mut Vec<Term>) {
    let n = blocks.len();
    let total: usize = blocks.iter().map(|&(r, s)| r + s).sum();
    let mut word = Vec::with_capacity(total);
    let mut denom = (n * total) as f64;
    for &(r, s) in blocks {
        word.extend(std::iter::repeat(0u8).take(r));
        word.extend(std::iter::repeat(1u8).take(s));
        denom *= factorial(r) * factorial(s);
    }
    // a word ending in a repeated letter has [.., [a, a]] = 0 innermost
    if word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2] {
        return;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    out.push(Term {
        coeff: sign / denom,
        word,
    });
}

fn generate(blocks: &mut Vec<(usize, usize)>, remaining: usize, out: &mut Vec<Term>) {
    if !blocks.is_empty() {
        push_term(blocks, out);
    }
    for total in 1..=remaining {
        for r in 0..=total {
            blocks.push((r, total - r));
            generate(blocks, remaining - total, out);
            blocks.pop();
        }
    }
}

fn table() -> &'static Vec<Term> {
    static TABLE: OnceLock<Vec<Term>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::new();
        generate(&mut Vec::new(), MAX_CLASS, &mut out);
        out
    })
}

/// cbh(x, y) = log(exp x exp y) truncated at total degree `class`, computed
/// with the supplied bracket. The caller is responsible for the nilpotent
/// context; `class` above [`MAX_CLASS`] is rejected.
pub fn cbh_with<F>(bracket: F, x: &[f64], y: &[f64], class: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    if class > MAX_CLASS {
        return Err(Error::Contract(format!(
            "cbh truncation order {class} exceeds the supported class {MAX_CLASS}"
        )));
    }
    let dim = x.len();
    if y.len() != dim {
        return Err(Error::Shape("cbh arguments have different lengths".into()));
    }
    let degree = class.max(1);
    let mut out = vec![0.0; dim];
    for term in table() {
        if term.word.len() > degree {
            continue;
        }
        let letter = |l: u8| if l == 0 { x } else { y };
        let last = term.word[term.word.len() - 1];
        let mut acc = letter(last).to_vec();
        for &l in term.word[..term.word.len() - 1].iter().rev() {
            acc = bracket(letter(l), &acc);
        }
        for (o, a) in out.iter_mut().zip(&acc) {
            *o += term.coeff * a;
        }
    }
    Ok(out)
}
