//! Number formatting: seven significant digits, nats unless `--bits`.

/// `v` with seven significant digits; scientific outside `[1e-4, 1e7)`.
pub fn sig7(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..7).contains(&mag) {
        return format!("{v:.6e}");
    }
    let decimals = (6 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit (9.9999995 -> 10.000000)
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    if digits.trim_start_matches('0').len() > 7 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unit {
    Nats,
    Bits,
}

impl Unit {
    pub fn from_flag(bits: bool) -> Self {
        if bits {
            Unit::Bits
        } else {
            Unit::Nats
        }
    }

    /// An information quantity in this unit, formatted.
    pub fn info(self, nats: f64) -> String {
        match self {
            Unit::Nats => sig7(nats),
            Unit::Bits => sig7(nats / std::f64::consts::LN_2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Nats => "nats",
            Unit::Bits => "bits",
        }
    }
}
