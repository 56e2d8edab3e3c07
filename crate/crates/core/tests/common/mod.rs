//! Independent reference implementations used as oracles. They share only
//! the documented conventions with the library, not its code paths.
#![allow(dead_code)]

use epigrn::landscape::{NkLandscape, NkcsLandscape};
use epigrn::network::{CellState, Genome};

/// Parse a string of '0'/'1' as a binary number.
fn binary(bits: &[bool]) -> usize {
    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    usize::from_str_radix(&s, 2).unwrap_or(0)
}

pub fn nk_oracle(land: &NkLandscape, traits: &[bool]) -> f64 {
    let n = land.n();
    let mut total = 0.0;
    for i in 0..n {
        let mut key = vec![traits[i]];
        for &j in &land.neighbors()[i] {
            key.push(traits[j]);
        }
        total += land.tables()[i][binary(&key)];
    }
    total / n as f64
}

pub fn nkcs_oracle(land: &NkcsLandscape, own: &[bool], partner: &[bool]) -> f64 {
    let n = land.n();
    let mut total = 0.0;
    for i in 0..n {
        let mut key = vec![own[i]];
        key.extend(land.neighbors()[i].iter().map(|&j| own[j]));
        for ext in &land.external()[i] {
            key.extend(ext.iter().map(|&j| partner[j]));
        }
        total += land.tables()[i][binary(&key)];
    }
    total / n as f64
}

pub fn all_genotypes(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n).map(|v| (0..n).map(|i| v & (1 << i) != 0).collect()).collect()
}

fn table_entry(table: u32, key: &[bool]) -> bool {
    (table / 2u32.pow(binary(key) as u32)) % 2 == 1
}

/// Classical synchronous RBN update: every node applies its function to its
/// inputs, input nodes are clamped. Ignores all epigenetic genes.
pub fn naive_rbn_step(g: &Genome, states: &[bool], input: &[bool]) -> Vec<bool> {
    let mut next = Vec::with_capacity(states.len());
    for (i, node) in g.nodes().iter().enumerate() {
        if i < input.len() {
            next.push(input[i]);
        } else {
            let key: Vec<bool> = node.inputs.iter().map(|&j| states[j]).collect();
            next.push(table_entry(node.function_table, &key));
        }
    }
    next
}

/// Epigenetic update written directly from the state machine: ports read
/// the partner through their first connection when a partner is present.
pub fn naive_epi_step(g: &Genome, s: &CellState, input: &[bool], partner: Option<&[bool]>) -> CellState {
    let n = g.n_traits();
    let r = g.r_nodes();
    let mut out = CellState { states: vec![false; r], methylated: vec![false; r] };
    for i in 0..r {
        let node = &g.nodes()[i];
        if i < n {
            out.states[i] = input[i];
            continue;
        }
        let mut was = s.methylated[i];
        let mut now = false;
        if node.epi_flag {
            let key: Vec<bool> = node.epi_inputs.iter().map(|&j| s.states[j]).collect();
            now = table_entry(node.epi_table, &key);
        } else {
            was = false;
        }
        out.methylated[i] = now;
        if now || was {
            out.states[i] = false;
            continue;
        }
        let key: Vec<bool> = node
            .inputs
            .iter()
            .enumerate()
            .map(|(slot, &j)| match partner {
                Some(p) if slot == 0 && (n..2 * n).contains(&i) => p[i - n],
                _ => s.states[j],
            })
            .collect();
        out.states[i] = table_entry(node.function_table, &key);
    }
    out
}

pub fn traits_of(g: &Genome, s: &CellState) -> Vec<bool> {
    g.trait_ids().map(|i| s.states[i]).collect()
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50)
}

pub fn ln_gamma(x: f64) -> f64 {
    // Lanczos, g = 7
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let t = x + 7.5;
    let s = C[1..].iter().enumerate().fold(C[0], |s, (i, c)| s + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

/// Two-tailed p by integrating the t density from 0 to |t|.
pub fn p_by_quadrature(t: f64, df: f64) -> f64 {
    let ln_c = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let pdf = move |x: f64| (ln_c - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    1.0 - 2.0 * simpson(&pdf, 0.0, t.abs(), 1e-13)
}
