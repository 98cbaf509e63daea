use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compile::{block_compression_costs, closed_form_costs};

/// Cooled bits targeted by the two reference grids.
const COOLED_BITS: u64 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub multiplier: u64,
    /// Spins a closed compression needs, `multiplier²`.
    pub rpc_spins: u64,
    /// Smallest level with `(3/2)^j_f ≥ multiplier`.
    pub j_f: u32,
    pub pac1_bits: u64,
    pub pac2_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub desired_multiplier: u64,
    pub j_f: u32,
    pub bits: u64,
    pub time_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    /// `(3/2)^J_f`, rounded half-up to one decimal.
    pub desired_multiplier: f64,
    pub multiplier_exact: f64,
    pub j_f: u32,
    pub bits: u64,
    pub time_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTables {
    pub fig1: Vec<Fig1Row>,
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
}

fn round_half_up_1dp(x: f64) -> f64 {
    (x * 10.0 + 0.5).floor() / 10.0
}

/// Smallest `j` with `3^j ≥ multiplier · 2^j`, in exact integer arithmetic.
fn levels_for(multiplier: u64) -> u32 {
    let mut j = 0u32;
    let (mut num, mut den) = (1u128, multiplier as u128);
    while num < den {
        j += 1;
        num *= 3;
        den *= 2;
    }
    j
}

fn fig1_row(multiplier: u64) -> Fig1Row {
    let j_f = levels_for(multiplier);
    let cf = closed_form_costs(j_f).expect("small level");
    Fig1Row {
        multiplier,
        rpc_spins: multiplier * multiplier,
        j_f,
        pac1_bits: cf.pac1_bits,
        pac2_bits: cf.pac2_bits,
    }
}

pub fn table_figures() -> ComparisonTables {
    let fig1 = [5, 25].into_iter().map(fig1_row).collect();
    let table1 = [3, 4]
        .into_iter()
        .map(|j| {
            let b = block_compression_costs(j).expect("small level");
            Table1Row {
                desired_multiplier: b.bias_multiplier,
                j_f: j,
                bits: b.bits_approx + COOLED_BITS,
                time_bound: b.time_bound,
            }
        })
        .collect();
    let table2 = [5, 7]
        .into_iter()
        .map(|j| {
            let cf = closed_form_costs(j).expect("small level");
            Table2Row {
                desired_multiplier: round_half_up_1dp(cf.bias_multiplier_smalleps),
                multiplier_exact: cf.bias_multiplier_smalleps,
                j_f: j,
                bits: 2 * j as u64 + COOLED_BITS,
                time_steps: COOLED_BITS * cf.time_steps,
            }
        })
        .collect();
    ComparisonTables {
        fig1,
        table1,
        table2,
    }
}

fn times_ten_to_four(t: u64) -> String {
    if t.is_multiple_of(10_000) {
        format!("{}×10^4", t / 10_000)
    } else {
        t.to_string()
    }
}

impl ComparisonTables {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Spins needed per bias multiplier");
        for r in &self.fig1 {
            let _ = writeln!(
                out,
                "×{}: RPC {}, PAC1 {}, PAC2 {} (J_f={})",
                r.multiplier, r.rpc_spins, r.pac1_bits, r.pac2_bits, r.j_f
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Block-compression reference, {COOLED_BITS} cooled bits (time is an upper bound)"
        );
        let _ = writeln!(out, "{:<10}{:>5}{:>6}{:>12}", "desired", "j_f", "N", "T");
        for r in &self.table1 {
            let _ = writeln!(
                out,
                "{:<10}{:>5}{:>6}{:>12}",
                format!("{}ε0", r.desired_multiplier),
                r.j_f,
                r.bits,
                times_ten_to_four(r.time_bound)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "PAC1, {COOLED_BITS} cooled bits");
        let _ = writeln!(out, "{:<10}{:>5}{:>6}{:>12}", "desired", "J_f", "N", "T");
        for r in &self.table2 {
            let _ = writeln!(
                out,
                "{:<10}{:>5}{:>6}{:>12}",
                format!("{:.1}ε0", r.desired_multiplier),
                r.j_f,
                r.bits,
                r.time_steps
            );
        }
        out
    }

    /// Three CSV blocks separated by blank lines: fig1, table1, table2.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("multiplier,rpc_spins,pac1_bits,pac2_bits,j_f\n");
        for r in &self.fig1 {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.multiplier, r.rpc_spins, r.pac1_bits, r.pac2_bits, r.j_f
            );
        }
        out.push_str("\ndesired_multiplier,j_f,bits,time_bound\n");
        for r in &self.table1 {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.desired_multiplier, r.j_f, r.bits, r.time_bound
            );
        }
        out.push_str("\ndesired_multiplier,j_f,bits,time_steps\n");
        for r in &self.table2 {
            let _ = writeln!(
                out,
                "{:.1},{},{},{}",
                r.desired_multiplier, r.j_f, r.bits, r.time_steps
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_search() {
        assert_eq!(levels_for(1), 0);
        assert_eq!(levels_for(5), 4);
        assert_eq!(levels_for(25), 8);
        // (3/2)^2 = 2.25 exactly reaches 2.25 but not 3
        assert_eq!(levels_for(3), 3);
    }

    #[test]
    fn fig1_rows() {
        let t = table_figures();
        let rows: Vec<_> = t
            .fig1
            .iter()
            .map(|r| (r.rpc_spins, r.pac1_bits, r.pac2_bits))
            .collect();
        assert_eq!(rows, vec![(25, 18, 9), (625, 34, 17)]);
    }

    #[test]
    fn reference_grids() {
        let t = table_figures();
        let t1: Vec<_> = t
            .table1
            .iter()
            .map(|r| (r.desired_multiplier, r.bits, r.time_bound))
            .collect();
        assert_eq!(t1, vec![(8, 140, 250_000), (16, 180, 1_250_000)]);
        let t2: Vec<_> = t
            .table2
            .iter()
            .map(|r| (format!("{:.1}", r.desired_multiplier), r.bits, r.time_steps))
            .collect();
        assert_eq!(
            t2,
            vec![
                ("7.6".to_string(), 30, 4040),
                ("17.1".to_string(), 34, 36440)
            ]
        );
    }

    #[test]
    fn text_is_stable() {
        let text = table_figures().to_text();
        assert!(text.contains("×5: RPC 25, PAC1 18, PAC2 9 (J_f=4)"));
        assert!(text.contains("×25: RPC 625, PAC1 34, PAC2 17 (J_f=8)"));
        assert!(text.contains("25×10^4"));
        assert!(text.contains("125×10^4"));
        assert_eq!(text, table_figures().to_text());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up_1dp(7.59375), 7.6);
        assert_eq!(round_half_up_1dp(17.0859375), 17.1);
        assert_eq!(round_half_up_1dp(0.25), 0.3);
    }
}
