//! Plain-text renderings of regression and causality results.

use std::fmt::Write;

use super::{EconError, GrangerRow, OlsFit};

/// Significance annotation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarRule {
    /// `***` below 0.001, `**` below 0.05, `*` below 0.1.
    Regression,
    /// `**` below 0.05, `*` below 0.1.
    Causality,
}

impl StarRule {
    pub fn stars(self, p: f64) -> &'static str {
        match self {
            StarRule::Regression if p < 0.001 => "***",
            _ if p < 0.05 => "**",
            _ if p < 0.1 => "*",
            _ => "",
        }
    }

    pub fn legend(self) -> &'static str {
        match self {
            StarRule::Regression => "(p-value < 0.001: ***, p-value < 0.05: **, p-value < 0.1: *)",
            StarRule::Causality => "(p-value < 0.05: **, p-value < 0.1: *)",
        }
    }
}

/// Three decimals, or C-style scientific notation below 0.001.
pub fn format_p(p: f64) -> String {
    if p.is_nan() {
        return "nan".into();
    }
    if p == 0.0 || p >= 0.001 {
        return format!("{p:.3}");
    }
    let s = format!("{p:.2e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn fmt3(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.3}")
    }
}

/// Coefficient table with significance stars and a model summary row.
pub fn regression_table(fit: &OlsFit) -> String {
    let rule = StarRule::Regression;
    let mut out = String::new();
    writeln!(
        out,
        "{:<16}{:>10}{:>10}{:>10}{:>11}",
        "Parameters", "Coeff.", "Std.Err.", "t", "p"
    )
    .unwrap();
    for i in 0..fit.params() {
        let name = if i == 0 {
            "Intercept"
        } else {
            fit.names[i].as_str()
        };
        let line = format!(
            "{:<16}{:>10}{:>10}{:>10}{:>11} {}",
            name,
            fmt3(fit.coefficients[i]),
            fmt3(fit.std_errors[i]),
            fmt3(fit.t_stats[i]),
            format_p(fit.p_values[i]),
            rule.stars(fit.p_values[i])
        );
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    let f_label = format!("F({},{})", fit.f_dof.0, fit.f_dof.1);
    writeln!(
        out,
        "{:<16}{:>18}{:>10}{:>10}{:>11}",
        "Summary", "Residual Std.Err", "Adj.R2", f_label, "p"
    )
    .unwrap();
    let line = format!(
        "{:<16}{:>18}{:>10}{:>10}{:>11} {}",
        "",
        fmt3(fit.residual_std_err),
        fmt3(fit.adj_r2),
        format!("{:.2}", fit.f_stat),
        format_p(fit.f_p_value),
        rule.stars(fit.f_p_value)
    );
    writeln!(out, "{}", line.trim_end()).unwrap();
    writeln!(out, "{}", rule.legend()).unwrap();
    out
}

fn lag_label(lag: usize) -> String {
    if lag == 1 {
        "1 day".into()
    } else {
        format!("{lag} days")
    }
}

/// Lags down, series across; each cell is the p-value with stars.
/// `columns[i].1[j]` must be the result for `lags[j]`.
pub fn causality_table(
    lags: &[usize],
    columns: &[(String, Vec<Result<GrangerRow, EconError>>)],
) -> String {
    let rule = StarRule::Causality;
    let mut out = String::new();
    let mut header = format!("{:<9}", "Lag");
    for (name, _) in columns {
        header.push_str(&format!("{name:<10}"));
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    for (j, &lag) in lags.iter().enumerate() {
        let mut line = format!("{:<9}", lag_label(lag));
        for (_, rows) in columns {
            let cell = match rows.get(j) {
                Some(Ok(r)) => format!("{}{}", format_p(r.p_value), rule.stars(r.p_value)),
                _ => "n/a".into(),
            };
            // keep one space even when a long cell overflows
            line.push_str(&format!("{cell:<9} "));
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    writeln!(out, "{}", rule.legend()).unwrap();
    out
}
