//! Text form of SD functions: one `(condition, value)` row per piece.
//!
//! Conditions:
//!
//! ```text
//! cond := "always" | chain ("&" chain)*
//! chain := operand op operand [op operand]     (exactly one operand is `d`)
//! op := "<" | "<=" | "==" | ">" | ">="
//! ```
//!
//! so `d <= -2`, `d == 1`, `-6 < d <= -3` and `d > -6 & d <= -3` are all
//! accepted. Values are affine expressions in `d` built from numbers,
//! `+ - * /` and parentheses: `0.4`, `d/3 + 1`, `-d/2 + 3/2`, `2/13*d`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{DomainKind, Piece, PieceValue, SdError, SdFunction};
use crate::ids::FunctionId;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num(f64),
    D,
    Always,
    Op(Cmp),
    And,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Cmp {
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
}

impl Cmp {
    fn flipped(self) -> Cmp {
        match self {
            Cmp::Lt => Cmp::Gt,
            Cmp::Le => Cmp::Ge,
            Cmp::Eq => Cmp::Eq,
            Cmp::Gt => Cmp::Lt,
            Cmp::Ge => Cmp::Le,
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn err(row: usize, position: usize, message: impl Into<String>) -> SdError {
    SdError::Parse {
        row,
        position,
        message: message.into(),
    }
}

/// `signed_numbers`: a `-` directly before a digit is part of the number (conditions have no subtraction).
fn lex(text: &str, row: usize, signed_numbers: bool) -> Result<Lexed, SdError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let is_num_start = |j: usize| j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.');
        match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {}
            b'-' | b'+' if signed_numbers && is_num_start(i + 1) => {}
            b'd' | b'D' if !bytes.get(i + 1).is_some_and(u8::is_ascii_alphabetic) => {
                toks.push((Tok::D, start));
                i += 1;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_alphabetic() {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word.to_ascii_lowercase().as_str() {
                    "always" => Tok::Always,
                    "and" => Tok::And,
                    _ => return Err(err(row, start, format!("unexpected word `{word}`"))),
                };
                toks.push((tok, start));
                i = j;
                continue;
            }
            _ => {
                let two = text.get(i..i + 2).unwrap_or("");
                let (tok, len) = match (two, c) {
                    ("<=", _) => (Tok::Op(Cmp::Le), 2),
                    (">=", _) => (Tok::Op(Cmp::Ge), 2),
                    ("==", _) => (Tok::Op(Cmp::Eq), 2),
                    ("&&", _) => (Tok::And, 2),
                    (_, b'<') => (Tok::Op(Cmp::Lt), 1),
                    (_, b'>') => (Tok::Op(Cmp::Gt), 1),
                    (_, b'=') => (Tok::Op(Cmp::Eq), 1),
                    (_, b'&') => (Tok::And, 1),
                    (_, b'+') => (Tok::Plus, 1),
                    (_, b'-') => (Tok::Minus, 1),
                    (_, b'*') => (Tok::Star, 1),
                    (_, b'/') => (Tok::Slash, 1),
                    (_, b'(') => (Tok::LParen, 1),
                    (_, b')') => (Tok::RParen, 1),
                    _ => {
                        let ch = text[i..].chars().next().unwrap_or('?');
                        return Err(err(row, start, format!("unexpected character `{ch}`")));
                    }
                };
                toks.push((tok, start));
                i += len;
                continue;
            }
        }
        // number
        let mut j = i;
        if bytes[j] == b'-' || bytes[j] == b'+' {
            j += 1;
        }
        while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
            j += 1;
        }
        if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
            let mut k = j + 1;
            if k < bytes.len() && (bytes[k] == b'-' || bytes[k] == b'+') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                j = k;
            }
        }
        let literal = &text[i..j];
        let value: f64 = literal
            .parse()
            .map_err(|_| err(row, start, format!("invalid number `{literal}`")))?;
        if !value.is_finite() {
            return Err(err(row, start, format!("number `{literal}` is not finite")));
        }
        toks.push((Tok::Num(value), start));
        i = j;
    }
    Ok(Lexed { toks, end: text.len() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Interval {
    lower: Option<(f64, bool)>,
    upper: Option<(f64, bool)>,
}

impl Interval {
    const ALL: Interval = Interval {
        lower: None,
        upper: None,
    };

    fn restrict(&mut self, op: Cmp, n: f64) {
        match op {
            Cmp::Lt => self.tighten_upper(n, false),
            Cmp::Le => self.tighten_upper(n, true),
            Cmp::Gt => self.tighten_lower(n, false),
            Cmp::Ge => self.tighten_lower(n, true),
            Cmp::Eq => {
                self.tighten_lower(n, true);
                self.tighten_upper(n, true);
            }
        }
    }

    fn tighten_upper(&mut self, n: f64, closed: bool) {
        self.upper = Some(match self.upper {
            Some((u, c)) if u < n || (u == n && !c) => (u, c),
            _ => (n, closed),
        });
    }

    fn tighten_lower(&mut self, n: f64, closed: bool) {
        self.lower = Some(match self.lower {
            Some((l, c)) if l > n || (l == n && !c) => (l, c),
            _ => (n, closed),
        });
    }

    fn is_empty(&self) -> bool {
        match (self.lower, self.upper) {
            (Some((l, lc)), Some((u, uc))) => l > u || (l == u && !(lc && uc)),
            _ => false,
        }
    }
}

fn parse_condition(text: &str, row: usize) -> Result<Interval, SdError> {
    let Lexed { toks, end } = lex(text, row, true)?;
    if toks.is_empty() {
        return Err(err(row, 0, "empty condition"));
    }
    if toks[0].0 == Tok::Always {
        if toks.len() > 1 {
            return Err(err(row, toks[1].1, "nothing may follow `always`"));
        }
        return Ok(Interval::ALL);
    }
    let mut interval = Interval::ALL;
    for chain in toks.split(|(t, _)| *t == Tok::And) {
        let chain_pos = chain.first().map(|&(_, p)| p).unwrap_or(end);
        if chain.len() != 3 && chain.len() != 5 {
            return Err(err(
                row,
                chain_pos,
                "expected a comparison such as `d <= 2` or `-6 < d <= -3`",
            ));
        }
        let mut operands = Vec::new();
        let mut ops = Vec::new();
        for (k, &(tok, pos)) in chain.iter().enumerate() {
            match (k % 2, tok) {
                (0, Tok::D) => operands.push((None, pos)),
                (0, Tok::Num(n)) => operands.push((Some(n), pos)),
                (1, Tok::Op(op)) => ops.push(op),
                (0, _) => return Err(err(row, pos, "expected `d` or a number")),
                _ => return Err(err(row, pos, "expected a comparison operator")),
            }
        }
        let d_at: Vec<usize> = (0..operands.len()).filter(|&k| operands[k].0.is_none()).collect();
        if d_at.len() != 1 {
            return Err(err(row, chain_pos, "each comparison must mention `d` exactly once"));
        }
        let d = d_at[0];
        if operands.len() == 3 && d != 1 {
            return Err(err(
                row,
                operands[1].1,
                "a chained comparison must have `d` in the middle",
            ));
        }
        if d > 0 {
            interval.restrict(ops[d - 1].flipped(), operands[d - 1].0.unwrap_or_default());
        }
        if d + 1 < operands.len() {
            interval.restrict(ops[d], operands[d + 1].0.unwrap_or_default());
        }
    }
    if interval.is_empty() {
        return Err(err(row, 0, "condition matches no value of d"));
    }
    Ok(interval)
}

/// `slope * d + constant`
#[derive(Clone, Copy, Debug, PartialEq)]
struct Linear {
    slope: f64,
    constant: f64,
}

struct ValueParser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
    end: usize,
    row: usize,
}

impl ValueParser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.at).map(|&(t, _)| t)
    }

    fn expr(&mut self) -> Result<Linear, SdError> {
        let mut acc = self.term()?;
        while let Some(op @ (Tok::Plus | Tok::Minus)) = self.peek() {
            self.at += 1;
            let rhs = self.term()?;
            let sign = if op == Tok::Plus { 1.0 } else { -1.0 };
            acc = Linear {
                slope: acc.slope + sign * rhs.slope,
                constant: acc.constant + sign * rhs.constant,
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Linear, SdError> {
        let mut acc = self.unary()?;
        while let Some(op @ (Tok::Star | Tok::Slash)) = self.peek() {
            let pos = self.pos();
            self.at += 1;
            let rhs = self.unary()?;
            acc = if op == Tok::Star {
                match (acc.slope == 0.0, rhs.slope == 0.0) {
                    (_, true) => Linear {
                        slope: acc.slope * rhs.constant,
                        constant: acc.constant * rhs.constant,
                    },
                    (true, false) => Linear {
                        slope: acc.constant * rhs.slope,
                        constant: acc.constant * rhs.constant,
                    },
                    _ => return Err(err(self.row, pos, "value must be affine in d")),
                }
            } else {
                if rhs.slope != 0.0 {
                    return Err(err(self.row, pos, "cannot divide by an expression in d"));
                }
                if rhs.constant == 0.0 {
                    return Err(err(self.row, pos, "division by zero"));
                }
                Linear {
                    slope: acc.slope / rhs.constant,
                    constant: acc.constant / rhs.constant,
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Linear, SdError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                let v = self.unary()?;
                Ok(Linear {
                    slope: -v.slope,
                    constant: -v.constant,
                })
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Linear, SdError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Linear {
                    slope: 0.0,
                    constant: n,
                })
            }
            Some(Tok::D) => {
                self.at += 1;
                Ok(Linear {
                    slope: 1.0,
                    constant: 0.0,
                })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(err(self.row, self.pos(), "expected `)`"));
                }
                self.at += 1;
                Ok(inner)
            }
            Some(_) => Err(err(self.row, pos, "expected a number, `d` or `(`")),
            None => Err(err(self.row, pos, "unexpected end of value")),
        }
    }
}

fn parse_value(text: &str, row: usize) -> Result<PieceValue, SdError> {
    let Lexed { toks, end } = lex(text, row, false)?;
    let mut parser = ValueParser {
        toks: &toks,
        at: 0,
        end,
        row,
    };
    let value = parser.expr()?;
    if parser.at != toks.len() {
        return Err(err(row, parser.pos(), "unexpected trailing input"));
    }
    Ok(if value.slope == 0.0 {
        PieceValue::Constant { value: value.constant }
    } else {
        PieceValue::Affine {
            slope: value.slope,
            intercept: value.constant,
        }
    })
}

/// Parses `(condition, value)` rows into a validated function.
///
/// With `domain = None` the domain is inferred: ordinal when the rows contain a
/// point condition (`d == k`) and every bound is an integer, cardinal otherwise.
pub fn parse_sd_rows<C: AsRef<str>, V: AsRef<str>>(
    id: impl Into<FunctionId>,
    domain: Option<DomainKind>,
    rows: &[(C, V)],
) -> Result<SdFunction, SdError> {
    if rows.is_empty() {
        return Err(SdError::EmptyFunction);
    }
    let mut pieces = Vec::with_capacity(rows.len());
    for (row, (cond, value)) in rows.iter().enumerate() {
        let interval = parse_condition(cond.as_ref(), row + 1)?;
        let value = parse_value(value.as_ref(), row + 1)?;
        pieces.push(Piece::new(
            interval.lower.map(|(l, _)| l),
            interval.lower.is_some_and(|(_, c)| c),
            interval.upper.map(|(u, _)| u),
            interval.upper.is_some_and(|(_, c)| c),
            value,
        ));
    }
    let domain = domain.unwrap_or_else(|| infer_domain(&pieces));
    SdFunction::new(id, domain, pieces)
}

fn infer_domain(pieces: &[Piece]) -> DomainKind {
    let has_point = pieces.iter().any(Piece::is_point);
    let integral = pieces
        .iter()
        .flat_map(|p| [p.lower, p.upper])
        .flatten()
        .all(|b| libm::trunc(b) == b);
    if has_point && integral {
        DomainKind::Ordinal
    } else {
        DomainKind::Cardinal
    }
}

fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

fn format_condition(p: &Piece) -> String {
    let lower_op = |closed: bool| if closed { "<=" } else { "<" };
    match (p.lower, p.upper) {
        (None, None) => "always".to_string(),
        (Some(l), Some(u)) if l == u => format!("d == {}", num(l)),
        (None, Some(u)) => format!("d {} {}", lower_op(p.upper_closed), num(u)),
        (Some(l), None) => format!("d {} {}", if p.lower_closed { ">=" } else { ">" }, num(l)),
        (Some(l), Some(u)) => format!(
            "{} {} d {} {}",
            num(l),
            lower_op(p.lower_closed),
            lower_op(p.upper_closed),
            num(u)
        ),
    }
}

fn format_slope(slope: f64) -> String {
    if slope == 1.0 {
        return "d".to_string();
    }
    if slope == -1.0 {
        return "-d".to_string();
    }
    let reciprocal = libm::round(1.0 / slope);
    if reciprocal != 0.0 && libm::fabs(reciprocal) < 1e15 && 1.0 / reciprocal == slope {
        let sign = if reciprocal < 0.0 { "-" } else { "" };
        return format!("{sign}d/{}", num(libm::fabs(reciprocal)));
    }
    format!("{}*d", num(slope))
}

fn format_value(value: &PieceValue) -> String {
    match *value {
        PieceValue::Constant { value } => num(value),
        PieceValue::Affine { slope, intercept } => {
            let mut out = format_slope(slope);
            if intercept > 0.0 {
                out.push_str(&format!(" + {}", num(intercept)));
            } else if intercept < 0.0 {
                out.push_str(&format!(" - {}", num(-intercept)));
            }
            out
        }
    }
}

/// Canonical `(condition, value)` rows; [`parse_sd_rows`] reads them back to an equal function.
pub fn format_sd_rows(f: &SdFunction) -> Vec<(String, String)> {
    f.pieces()
        .iter()
        .map(|p| (format_condition(p), format_value(&p.value)))
        .collect()
}
