//! Lasso programs: stem and loop transitions over `(x, x')` as
//! conjunctions of linear constraints.
//!
//! The `.lasso` concrete syntax is
//!
//! ```text
//! program  ::= "vars" ":" ident+ ";" [ "stem" ":" formula ";" ] "loop" ":" formula ";"
//! formula  ::= "true" | atom ( "&&" atom )*
//! atom     ::= linexpr rel linexpr        rel ::= "<=" | ">=" | "<" | ">" | "="
//! linexpr  ::= [ "+" | "-" ] term ( ("+"|"-") term )*
//! term     ::= rational [ "*" ] var | rational | var
//! var      ::= ident [ "'" ]             (prime marks the next-state variable)
//! ```
//!
//! Rationals are integers, fractions `p/q`, or finite decimals, all read
//! exactly. An omitted stem means `stem: true`. Parsing normalizes every
//! atom to `<=`/`<` rows with the constant moved to the bound; `=` becomes
//! the row pair `rhs - lhs <= 0`, `lhs - rhs <= 0`.

use std::fmt;

use crate::linalg::{ExactMatrix, ExactVector};
use crate::scalar::Scalar;

/// One normalized constraint: `coeffs_x·x + coeffs_xp·x' <= bound`,
/// strictly when `strict` is set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstraintRow {
    pub coeffs_x: ExactVector,
    pub coeffs_xp: ExactVector,
    pub bound: Scalar,
    pub strict: bool,
}

impl ConstraintRow {
    /// The left-hand side value at a concrete transition `(x, xp)`.
    pub fn lhs(&self, x: &ExactVector, xp: &ExactVector) -> Scalar {
        self.coeffs_x.dot(x) + self.coeffs_xp.dot(xp)
    }

    pub fn satisfied(&self, x: &ExactVector, xp: &ExactVector) -> bool {
        let lhs = self.lhs(x, xp);
        if self.strict {
            lhs < self.bound
        } else {
            lhs <= self.bound
        }
    }

    /// True when no next-state variable has a nonzero coefficient.
    pub fn is_guard_only(&self) -> bool {
        self.coeffs_xp.is_zero()
    }
}

/// A conjunction of constraint rows over a fixed dimension.
/// No rows means the relation `true`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub rows: Vec<ConstraintRow>,
    pub dim: usize,
}

impl Transition {
    pub fn always_true(dim: usize) -> Self {
        Transition { rows: Vec::new(), dim }
    }

    pub fn is_true(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Membership test `(x, xp) ∈ t`: every row satisfied, strict rows strictly.
/// Panics on dimension mismatch.
pub fn holds(t: &Transition, x: &ExactVector, xp: &ExactVector) -> bool {
    assert_eq!(x.dim(), t.dim, "state dimension mismatch");
    assert_eq!(xp.dim(), t.dim, "next-state dimension mismatch");
    t.rows.iter().all(|row| row.satisfied(x, xp))
}

/// A lasso program: named variables, a stem relation, and a loop relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LassoProgram {
    pub var_names: Vec<String>,
    pub stem: Transition,
    pub loop_: Transition,
}

impl LassoProgram {
    pub fn dim(&self) -> usize {
        self.var_names.len()
    }

    /// Renders the program back into the `.lasso` syntax. Reparsing the
    /// result yields row-identical transitions.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        out.push_str("vars:");
        for name in &self.var_names {
            out.push(' ');
            out.push_str(name);
        }
        out.push_str(";\nstem: ");
        out.push_str(&self.format_transition(&self.stem));
        out.push_str(";\nloop: ");
        out.push_str(&self.format_transition(&self.loop_));
        out.push_str(";\n");
        out
    }

    fn format_transition(&self, t: &Transition) -> String {
        if t.is_true() {
            return "true".to_string();
        }
        t.rows
            .iter()
            .map(|row| self.format_row(row))
            .collect::<Vec<_>>()
            .join(" && ")
    }

    fn format_row(&self, row: &ConstraintRow) -> String {
        let mut lhs = String::new();
        let emit = |coeff: &Scalar, var: &str, lhs: &mut String| {
            if coeff.is_zero() {
                return;
            }
            if lhs.is_empty() {
                if coeff.is_negative() {
                    lhs.push('-');
                }
            } else if coeff.is_negative() {
                lhs.push_str(" - ");
            } else {
                lhs.push_str(" + ");
            }
            let mag = coeff.abs();
            if mag == Scalar::one() {
                lhs.push_str(var);
            } else {
                lhs.push_str(&format!("{mag}*{var}"));
            }
        };
        for (j, name) in self.var_names.iter().enumerate() {
            emit(&row.coeffs_x[j], name, &mut lhs);
        }
        for (j, name) in self.var_names.iter().enumerate() {
            emit(&row.coeffs_xp[j], &format!("{name}'"), &mut lhs);
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        let rel = if row.strict { "<" } else { "<=" };
        format!("{lhs} {rel} {}", row.bound)
    }
}

impl fmt::Display for LassoProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}

/// A loop in the shape `G·x <= g  ∧  x' = M·x + m` (guard rows may be
/// strict; update rows come from paired opposite non-strict rows).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeterministicUpdate {
    pub guard_coeffs: ExactMatrix,
    pub guard_bounds: ExactVector,
    pub guard_strict: Vec<bool>,
    pub update_matrix: ExactMatrix,
    pub update_offset: ExactVector,
}

impl DeterministicUpdate {
    pub fn dim(&self) -> usize {
        self.update_matrix.rows()
    }

    /// True when `x` satisfies every guard row.
    pub fn guard_holds(&self, x: &ExactVector) -> bool {
        for i in 0..self.guard_coeffs.rows() {
            let lhs = self.guard_coeffs.row(i).dot(x);
            let sat = if self.guard_strict[i] {
                lhs < self.guard_bounds[i]
            } else {
                lhs <= self.guard_bounds[i]
            };
            if !sat {
                return false;
            }
        }
        true
    }

    /// Applies the update map `x ↦ M·x + m`.
    pub fn step(&self, x: &ExactVector) -> ExactVector {
        self.update_matrix.matvec(x).add(&self.update_offset)
    }
}

/// Recovers the `(G, g, M, m)` decomposition of a loop, if it has one.
///
/// Rows without next-state variables become guard rows. Every remaining
/// row must be non-strict and pair up with its exact negation; the paired
/// equalities must then solve all next-state variables as one affine
/// function of the current state, with nothing left over. Any other shape
/// returns None; absence is an answer, not an error.
pub fn detect_deterministic(loop_: &Transition) -> Option<DeterministicUpdate> {
    let n = loop_.dim;
    let mut guard_rows: Vec<(ExactVector, Scalar, bool)> = Vec::new();
    let mut update_rows: Vec<&ConstraintRow> = Vec::new();
    for row in &loop_.rows {
        if row.is_guard_only() {
            guard_rows.push((row.coeffs_x.clone(), row.bound.clone(), row.strict));
        } else {
            if row.strict {
                return None;
            }
            update_rows.push(row);
        }
    }

    // Pair each update row with its exact negation.
    let mut matched = vec![false; update_rows.len()];
    let mut equalities: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..update_rows.len() {
        if matched[i] {
            continue;
        }
        let a = update_rows[i];
        let partner = (i + 1..update_rows.len()).find(|&j| {
            !matched[j]
                && update_rows[j].coeffs_x == a.coeffs_x.scale(&-Scalar::one())
                && update_rows[j].coeffs_xp == a.coeffs_xp.scale(&-Scalar::one())
                && update_rows[j].bound == -a.bound.clone()
        })?;
        matched[i] = true;
        matched[partner] = true;
        // Store as  coeffs_xp·x' + coeffs_x·x = bound.
        let mut eq: Vec<Scalar> = a.coeffs_xp.iter().cloned().collect();
        eq.extend(a.coeffs_x.iter().cloned());
        eq.push(a.bound.clone());
        equalities.push(eq);
    }

    // Eliminate on the x' block; a unique affine solution needs rank n
    // and fully vanishing leftover rows.
    let rank = crate::linalg::rref(&mut equalities, n);
    if rank < n {
        return None;
    }
    for eq in equalities.iter().skip(rank) {
        if eq.iter().any(|c| !c.is_zero()) {
            return None;
        }
    }
    let mut update_matrix = ExactMatrix::zeros(n, n);
    let mut update_offset = ExactVector::zeros(n);
    for eq in equalities.iter().take(rank) {
        let lead = (0..n).find(|&j| !eq[j].is_zero()).expect("pivot row");
        // Row reads  x'_lead + Σ c_j x_j = β.
        for j in 0..n {
            update_matrix[(lead, j)] = -eq[n + j].clone();
        }
        update_offset[lead] = eq[2 * n].clone();
    }

    let guard_coeffs = if guard_rows.is_empty() {
        ExactMatrix::zeros(0, n)
    } else {
        ExactMatrix::from_rows(
            guard_rows.iter().map(|(c, _, _)| c.iter().cloned().collect()).collect(),
        )
    };
    Some(DeterministicUpdate {
        guard_coeffs,
        guard_bounds: ExactVector(guard_rows.iter().map(|(_, b, _)| b.clone()).collect()),
        guard_strict: guard_rows.iter().map(|(_, _, s)| *s).collect(),
        update_matrix,
        update_offset,
    })
}

/// Position-tagged parse failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses `.lasso` source text.
pub fn parse_lasso(text: &str) -> Result<LassoProgram, ParseError> {
    Parser::new(text)?.program()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    PrimedIdent(String),
    Number(Scalar),
    Colon,
    Semi,
    AndAnd,
    Plus,
    Minus,
    Star,
    Le,
    Ge,
    Lt,
    Gt,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::PrimedIdent(s) => write!(f, "`{s}'`"),
            Tok::Number(x) => write!(f, "`{x}`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::AndAnd => write!(f, "`&&`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { tokens: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, line, column) = self.tokens[self.pos];
        (line, column)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.here();
        ParseError { line, column, message: message.into() }
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == word => {
                self.bump();
                Ok(())
            }
            other => Err(self.error(format!("expected `{word}`, found {other}"))),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn program(&mut self) -> Result<LassoProgram, ParseError> {
        self.expect_keyword("vars")?;
        self.expect(&Tok::Colon)?;
        let mut var_names = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    if name == "stem" || name == "loop" || name == "true" || name == "vars" {
                        return Err(self.error(format!("`{name}` is a keyword, not a variable name")));
                    }
                    if var_names.contains(&name) {
                        return Err(self.error(format!("duplicate variable `{name}`")));
                    }
                    var_names.push(name);
                    self.bump();
                }
                Tok::Semi => break,
                other => {
                    return Err(self.error(format!("expected a variable name or `;`, found {other}")))
                }
            }
        }
        if var_names.is_empty() {
            return Err(self.error("a program needs at least one variable"));
        }
        self.expect(&Tok::Semi)?;

        let stem = if self.at_keyword("stem") {
            self.bump();
            self.expect(&Tok::Colon)?;
            let t = self.formula(&var_names)?;
            self.expect(&Tok::Semi)?;
            t
        } else {
            Transition::always_true(var_names.len())
        };

        self.expect_keyword("loop")?;
        self.expect(&Tok::Colon)?;
        let loop_ = self.formula(&var_names)?;
        self.expect(&Tok::Semi)?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(format!("unexpected {} after the loop section", self.peek())));
        }
        Ok(LassoProgram { var_names, stem, loop_ })
    }

    fn formula(&mut self, vars: &[String]) -> Result<Transition, ParseError> {
        let n = vars.len();
        if self.at_keyword("true") {
            self.bump();
            return Ok(Transition::always_true(n));
        }
        let mut rows = Vec::new();
        loop {
            self.atom(vars, &mut rows)?;
            if *self.peek() == Tok::AndAnd {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Transition { rows, dim: n })
    }

    fn atom(&mut self, vars: &[String], rows: &mut Vec<ConstraintRow>) -> Result<(), ParseError> {
        let lhs = self.linexpr(vars)?;
        let rel = match self.peek() {
            Tok::Le | Tok::Ge | Tok::Lt | Tok::Gt | Tok::Eq => self.bump(),
            other => return Err(self.error(format!("expected a relation, found {other}"))),
        };
        let rhs = self.linexpr(vars)?;
        let n = vars.len();
        let row_from = |diff: LinComb, strict: bool| {
            let bound = -diff.constant;
            ConstraintRow {
                coeffs_x: ExactVector(diff.coeffs[..n].to_vec()),
                coeffs_xp: ExactVector(diff.coeffs[n..].to_vec()),
                bound,
                strict,
            }
        };
        match rel {
            Tok::Le => rows.push(row_from(lhs.sub(&rhs), false)),
            Tok::Lt => rows.push(row_from(lhs.sub(&rhs), true)),
            Tok::Ge => rows.push(row_from(rhs.sub(&lhs), false)),
            Tok::Gt => rows.push(row_from(rhs.sub(&lhs), true)),
            Tok::Eq => {
                rows.push(row_from(rhs.sub(&lhs), false));
                rows.push(row_from(lhs.sub(&rhs), false));
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn linexpr(&mut self, vars: &[String]) -> Result<LinComb, ParseError> {
        let mut acc = LinComb::zero(vars.len());
        let mut negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let term = self.term(vars)?;
            acc = if negate { acc.sub(&term) } else { acc.add(&term) };
            negate = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    false
                }
                Tok::Minus => {
                    self.bump();
                    true
                }
                _ => break,
            };
        }
        Ok(acc)
    }

    fn term(&mut self, vars: &[String]) -> Result<LinComb, ParseError> {
        let n = vars.len();
        match self.peek().clone() {
            Tok::Number(value) => {
                self.bump();
                if *self.peek() == Tok::Star {
                    self.bump();
                    let slot = self.var_slot(vars)?;
                    Ok(LinComb::var(n, slot, value))
                } else if matches!(self.peek(), Tok::Ident(_) | Tok::PrimedIdent(_)) {
                    let slot = self.var_slot(vars)?;
                    Ok(LinComb::var(n, slot, value))
                } else {
                    Ok(LinComb::constant(n, value))
                }
            }
            Tok::Ident(_) | Tok::PrimedIdent(_) => {
                let slot = self.var_slot(vars)?;
                Ok(LinComb::var(n, slot, Scalar::one()))
            }
            other => Err(self.error(format!("expected a term, found {other}"))),
        }
    }

    fn var_slot(&mut self, vars: &[String]) -> Result<usize, ParseError> {
        let (name, primed) = match self.peek().clone() {
            Tok::Ident(s) => (s, false),
            Tok::PrimedIdent(s) => (s, true),
            other => return Err(self.error(format!("expected a variable, found {other}"))),
        };
        let Some(index) = vars.iter().position(|v| *v == name) else {
            return Err(self.error(format!("unknown variable `{name}`")));
        };
        self.bump();
        Ok(if primed { vars.len() + index } else { index })
    }
}

/// A linear expression over `(x, x')` plus a constant, length `2n`.
struct LinComb {
    coeffs: Vec<Scalar>,
    constant: Scalar,
}

impl LinComb {
    fn zero(n: usize) -> Self {
        LinComb { coeffs: vec![Scalar::zero(); 2 * n], constant: Scalar::zero() }
    }

    fn constant(n: usize, value: Scalar) -> Self {
        let mut c = Self::zero(n);
        c.constant = value;
        c
    }

    fn var(n: usize, slot: usize, coeff: Scalar) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[slot] = coeff;
        c
    }

    fn add(&self, rhs: &LinComb) -> LinComb {
        LinComb {
            coeffs: self
                .coeffs
                .iter()
                .zip(rhs.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &rhs.constant,
        }
    }

    fn sub(&self, rhs: &LinComb) -> LinComb {
        LinComb {
            coeffs: self
                .coeffs
                .iter()
                .zip(rhs.coeffs.iter())
                .map(|(a, b)| a - b)
                .collect(),
            constant: &self.constant - &rhs.constant,
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    let err = |line: usize, col: usize, message: String| ParseError { line, column: col, message };
    while i < bytes.len() {
        let c = bytes[i] as char;
        let (tline, tcol) = (line, col);
        let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
            if bytes[*i] == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                advance(&mut i, &mut line, &mut col);
            }
            '#' => {
                // Comment to end of line.
                while i < bytes.len() && bytes[i] != b'\n' {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            ':' => {
                tokens.push((Tok::Colon, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            ';' => {
                tokens.push((Tok::Semi, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            '+' => {
                tokens.push((Tok::Plus, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            '-' => {
                tokens.push((Tok::Minus, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            '*' => {
                tokens.push((Tok::Star, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            '&' => {
                advance(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == b'&' {
                    advance(&mut i, &mut line, &mut col);
                    tokens.push((Tok::AndAnd, tline, tcol));
                } else {
                    return Err(err(tline, tcol, "stray `&`, expected `&&`".into()));
                }
            }
            '<' => {
                advance(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == b'=' {
                    advance(&mut i, &mut line, &mut col);
                    tokens.push((Tok::Le, tline, tcol));
                } else {
                    tokens.push((Tok::Lt, tline, tcol));
                }
            }
            '>' => {
                advance(&mut i, &mut line, &mut col);
                if i < bytes.len() && bytes[i] == b'=' {
                    advance(&mut i, &mut line, &mut col);
                    tokens.push((Tok::Ge, tline, tcol));
                } else {
                    tokens.push((Tok::Gt, tline, tcol));
                }
            }
            '=' => {
                tokens.push((Tok::Eq, tline, tcol));
                advance(&mut i, &mut line, &mut col);
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
                if i < bytes.len() && (bytes[i] == b'/' || bytes[i] == b'.') {
                    let sep = i;
                    if i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            advance(&mut i, &mut line, &mut col);
                        }
                    } else if bytes[sep] == b'.' {
                        return Err(err(tline, tcol, "decimal literal needs digits after `.`".into()));
                    }
                }
                let literal = &text[start..i];
                let value: Scalar = literal
                    .parse()
                    .map_err(|_| err(tline, tcol, format!("malformed number `{literal}`")))?;
                tokens.push((Tok::Number(value), tline, tcol));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    advance(&mut i, &mut line, &mut col);
                }
                let name = text[start..i].to_string();
                if i < bytes.len() && bytes[i] == b'\'' {
                    advance(&mut i, &mut line, &mut col);
                    if i < bytes.len() && bytes[i] == b'\'' {
                        return Err(err(tline, tcol, format!("`{name}''`: only one prime is allowed")));
                    }
                    tokens.push((Tok::PrimedIdent(name), tline, tcol));
                } else {
                    tokens.push((Tok::Ident(name), tline, tcol));
                }
            }
            _ => {
                return Err(err(tline, tcol, format!("unexpected character `{c}`")));
            }
        }
    }
    tokens.push((Tok::Eof, line, col));
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[i64]) -> ExactVector {
        ExactVector::from_ints(entries)
    }

    pub(crate) const FIG1C: &str = "vars: a b;\nstem: a' = a && b' = 1;\nloop: a + b >= 4 && a' = 3*a + b && b' = 2*b;\n";

    #[test]
    fn fig1c_loop_rows_in_documented_order() {
        let p = parse_lasso(FIG1C).unwrap();
        assert_eq!(p.var_names, vec!["a", "b"]);
        let rows = &p.loop_.rows;
        assert_eq!(rows.len(), 5);
        // -a - b <= -4
        assert_eq!(rows[0].coeffs_x, v(&[-1, -1]));
        assert_eq!(rows[0].coeffs_xp, v(&[0, 0]));
        assert_eq!(rows[0].bound, Scalar::from_int(-4));
        assert!(!rows[0].strict);
        // 3a + b - a' <= 0
        assert_eq!(rows[1].coeffs_x, v(&[3, 1]));
        assert_eq!(rows[1].coeffs_xp, v(&[-1, 0]));
        assert_eq!(rows[1].bound, Scalar::zero());
        // a' - 3a - b <= 0
        assert_eq!(rows[2].coeffs_x, v(&[-3, -1]));
        assert_eq!(rows[2].coeffs_xp, v(&[1, 0]));
        // 2b - b' <= 0
        assert_eq!(rows[3].coeffs_x, v(&[0, 2]));
        assert_eq!(rows[3].coeffs_xp, v(&[0, -1]));
        // b' - 2b <= 0
        assert_eq!(rows[4].coeffs_x, v(&[0, -2]));
        assert_eq!(rows[4].coeffs_xp, v(&[0, 1]));
    }

    #[test]
    fn empty_relations_parse_as_true() {
        let p = parse_lasso("vars: x; stem: true; loop: true;").unwrap();
        assert!(p.stem.is_true());
        assert!(p.loop_.is_true());
        let no_stem = parse_lasso("vars: x; loop: true;").unwrap();
        assert!(no_stem.stem.is_true());
    }

    #[test]
    fn equality_normalizes_to_two_bounded_rows() {
        let p = parse_lasso("vars: x; loop: x >= 0 && x' = x - 1;").unwrap();
        let rows = &p.loop_.rows;
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].coeffs_x, v(&[-1]));
        assert_eq!(rows[0].bound, Scalar::zero());
        // x - x' <= 1
        assert_eq!(rows[1].coeffs_x, v(&[1]));
        assert_eq!(rows[1].coeffs_xp, v(&[-1]));
        assert_eq!(rows[1].bound, Scalar::one());
        // x' - x <= -1
        assert_eq!(rows[2].coeffs_x, v(&[-1]));
        assert_eq!(rows[2].coeffs_xp, v(&[1]));
        assert_eq!(rows[2].bound, Scalar::from_int(-1));
    }

    #[test]
    fn rejects_unknown_variable_with_position() {
        let e = parse_lasso("vars: x;\nloop: y >= 0;").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("unknown variable `y`"));
    }

    #[test]
    fn rejects_syntax_errors() {
        assert!(parse_lasso("loop: x >= 0;").is_err());
        assert!(parse_lasso("vars: x; loop: x >= ;").is_err());
        assert!(parse_lasso("vars: x; loop: x' ' >= 0;").is_err());
        assert!(parse_lasso("vars: x; loop: x >= 0; extra").is_err());
        assert!(parse_lasso("vars: x x; loop: true;").is_err());
    }

    #[test]
    fn holds_checks_rows_exactly() {
        let p = parse_lasso(FIG1C).unwrap();
        assert!(holds(&p.loop_, &v(&[3, 1]), &v(&[10, 2])));
        assert!(!holds(&p.loop_, &v(&[3, 1]), &v(&[0, 0])));
    }

    #[test]
    fn strict_rows_hold_strictly() {
        let p = parse_lasso("vars: x; loop: x > 0 && 2*x' = x;").unwrap();
        let half = ExactVector(vec![Scalar::from_ratio(1, 2)]);
        assert!(holds(&p.loop_, &v(&[1]), &half));
        assert!(!holds(&p.loop_, &v(&[0]), &v(&[0])));
    }

    #[test]
    fn round_trip_preserves_rows() {
        for src in [
            FIG1C,
            "vars: x; loop: x > 0 && 2*x' = x;",
            "vars: x y; stem: x' = 1/2 && y' = y; loop: x + y >= 0 && x' = x - 1 && y' = y;",
            "vars: x; loop: true;",
        ] {
            let p = parse_lasso(src).unwrap();
            let reparsed = parse_lasso(&p.to_source()).unwrap();
            assert_eq!(p, reparsed, "round trip failed for {src}");
        }
    }

    #[test]
    fn detects_fig1b_update() {
        let p = parse_lasso("vars: a b; stem: a' = a && b' = 1; loop: a + b >= 3 && a' = 3*a - 2 && b' = 2*b;")
            .unwrap();
        let d = detect_deterministic(&p.loop_).unwrap();
        assert_eq!(d.guard_coeffs, ExactMatrix::from_int_rows(&[&[-1, -1]]));
        assert_eq!(d.guard_bounds, v(&[-3]));
        assert_eq!(d.guard_strict, vec![false]);
        assert_eq!(d.update_matrix, ExactMatrix::from_int_rows(&[&[3, 0], &[0, 2]]));
        assert_eq!(d.update_offset, v(&[-2, 0]));
    }

    #[test]
    fn nondeterministic_loops_are_not_decomposed() {
        // b' is unconstrained, so no affine update exists.
        let p = parse_lasso("vars: a b; stem: a' = a && b' = 1; loop: a + b >= 3 && a' = 3*a + 1;")
            .unwrap();
        assert!(detect_deterministic(&p.loop_).is_none());
        let trivial = parse_lasso("vars: x; loop: true;").unwrap();
        assert!(detect_deterministic(&trivial.loop_).is_none());
        // One-sided bound on x' is not an equality.
        let one_sided = parse_lasso("vars: x; loop: x' >= x;").unwrap();
        assert!(detect_deterministic(&one_sided.loop_).is_none());
    }

    #[test]
    fn strict_guard_survives_decomposition() {
        let p = parse_lasso("vars: a; loop: a > 0 && 2*a' = a;").unwrap();
        let d = detect_deterministic(&p.loop_).unwrap();
        assert_eq!(d.guard_strict, vec![true]);
        assert_eq!(
            d.update_matrix,
            ExactMatrix::from_rows(vec![vec![Scalar::from_ratio(1, 2)]])
        );
        assert!(d.guard_holds(&v(&[1])));
        assert!(!d.guard_holds(&v(&[0])));
        assert_eq!(d.step(&v(&[1])), ExactVector(vec![Scalar::from_ratio(1, 2)]));
    }
}
