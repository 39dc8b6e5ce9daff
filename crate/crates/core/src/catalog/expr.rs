//! Expression language for user-defined immersions and curves.
//!
//! ```text
//! list   := expr (',' expr)*
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Functions: sin cos tan exp log sqrt sinh cosh. Positions in errors are
//! 1-based character offsets.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::curves::AmbientCurve;
use crate::error::{GeomError, ParseError, Result};
use crate::manifold::{BoxDomain, ImmersedPatch};
use crate::numerics::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64, position: usize) -> Result<f64> {
        let fault = |what: &str| GeomError::NumericalDomain {
            context: format!("{what} at position {position} (argument {x})"),
        };
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log if x <= 0.0 => return Err(fault("log of a nonpositive number")),
            Func::Log => x.ln(),
            Func::Sqrt if x < 0.0 => return Err(fault("sqrt of a negative number")),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(fault(&format!("{} is not finite", self.name())))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Syntax tree. `position` fields point at the operator or function name.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Param(String),
    /// Index into the variable list (u1 is 0).
    Var(usize),
    Neg(Box<Expr>),
    Call {
        func: Func,
        arg: Box<Expr>,
        position: usize,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        position: usize,
    },
}

fn power(b: f64, e: f64, position: usize) -> Result<f64> {
    let y = if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        b.powi(e as i32)
    } else if b > 0.0 {
        (e * b.ln()).exp()
    } else if b == 0.0 && e > 0.0 {
        0.0
    } else {
        return Err(GeomError::NumericalDomain {
            context: format!("non-integer power {e} of {b} at position {position}"),
        });
    };
    if y.is_finite() {
        Ok(y)
    } else {
        Err(GeomError::NumericalDomain {
            context: format!("power {b}^{e} is not finite at position {position}"),
        })
    }
}

/// Evaluates `ast` with variable values `vars` and named parameters.
pub fn eval_ast(ast: &Expr, vars: &[f64], params: &BTreeMap<String, f64>) -> Result<f64> {
    match ast {
        Expr::Const(c) => Ok(*c),
        Expr::Param(name) => params.get(name).copied().ok_or_else(|| GeomError::BadParameter {
            name: name.clone(),
            reason: "parameter is not bound".into(),
        }),
        Expr::Var(i) => vars.get(*i).copied().ok_or(GeomError::DimensionMismatch {
            expected: i + 1,
            found: vars.len(),
        }),
        Expr::Neg(x) => Ok(-eval_ast(x, vars, params)?),
        Expr::Call { func, arg, position } => func.apply(eval_ast(arg, vars, params)?, *position),
        Expr::Binary {
            op,
            lhs,
            rhs,
            position,
        } => {
            let a = eval_ast(lhs, vars, params)?;
            let b = eval_ast(rhs, vars, params)?;
            match op {
                BinOp::Add => Ok(a + b),
                BinOp::Sub => Ok(a - b),
                BinOp::Mul => Ok(a * b),
                BinOp::Div if b == 0.0 => Err(GeomError::NumericalDomain {
                    context: format!("division by zero at position {position}"),
                }),
                BinOp::Div => Ok(a / b),
                BinOp::Pow => power(a, b, *position),
            }
        }
    }
}

/// Fully parenthesized rendering that reparses to an equivalent tree.
pub struct Pretty<'a> {
    expr: &'a Expr,
    vars: &'a [String],
}

impl<'a> fmt::Display for Pretty<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e: &'a Expr| Pretty { expr: e, vars: self.vars };
        match self.expr {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Var(i) => match self.vars.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "u{}", i + 1),
            },
            Expr::Neg(x) => write!(f, "(-{})", sub(x)),
            Expr::Call { func, arg, .. } => write!(f, "{}({})", func.name(), sub(arg)),
            Expr::Binary { op, lhs, rhs, .. } => {
                write!(f, "({} {} {})", sub(lhs), op.symbol(), sub(rhs))
            }
        }
    }
}

impl Expr {
    pub fn pretty<'a>(&'a self, vars: &'a [String]) -> Pretty<'a> {
        Pretty { expr: self, vars }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, expected: &[&str]) -> ParseError {
    ParseError::SyntaxError {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            let value = lexeme.parse::<f64>().map_err(|_| syntax(pos, &["number"]))?;
            out.push(Token {
                tok: Tok::Num(value),
                pos,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return Err(syntax(pos, &["number", "identifier", "operator", "'('", "')'", "','"]));
        }
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len() + 1,
    });
    Ok(out)
}

const OPERAND: [&str; 4] = ["number", "identifier", "'('", "'-'"];

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    vars: &'a [String],
    params: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn list(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut items = vec![self.expr()?];
        while self.is_sym(',') {
            self.bump();
            items.push(self.expr()?);
        }
        Ok(items)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let position = self.bump().pos;
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                position,
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            let position = self.bump().pos;
            let rhs = self.factor()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                position,
            };
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.is_sym('^') {
            let position = self.bump().pos;
            let exponent = self.factor()?;
            return Ok(Expr::Binary {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
                position,
            });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let tok = self.bump();
        match tok.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Sym('-') => Ok(Expr::Neg(Box::new(self.base()?))),
            Tok::Sym('(') => {
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.is_sym('(') {
                    let open = self.bump().pos;
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
                        name: name.clone(),
                        position: tok.pos,
                    })?;
                    let args = self.list()?;
                    self.expect_close()?;
                    if args.len() != 1 {
                        return Err(ParseError::ArityError {
                            name,
                            position: open,
                            expected: 1,
                            found: args.len(),
                        });
                    }
                    let arg = args.into_iter().next().expect("one argument");
                    return Ok(Expr::Call {
                        func,
                        arg: Box::new(arg),
                        position: tok.pos,
                    });
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Expr::Var(i))
                } else if self.params.contains_key(&name) {
                    Ok(Expr::Param(name))
                } else if Func::from_name(&name).is_some() {
                    Err(syntax(self.peek().pos, &["'('"]))
                } else {
                    Err(ParseError::UnknownIdentifier {
                        name,
                        position: tok.pos,
                    })
                }
            }
            _ => Err(syntax(tok.pos, &OPERAND)),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        if self.is_sym(')') {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.peek().pos,
                &["'+'", "'-'", "'*'", "'/'", "'^'", "','", "')'"],
            ))
        }
    }
}

/// Parses a comma-separated list of expressions over the named variables.
pub fn parse_list(
    text: &str,
    vars: &[String],
    params: &BTreeMap<String, f64>,
) -> Result<Vec<Expr>, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        vars,
        params,
    };
    let items = p.list()?;
    if p.peek().tok != Tok::End {
        return Err(syntax(
            p.peek().pos,
            &["'+'", "'-'", "'*'", "'/'", "'^'", "','", "end of input"],
        ));
    }
    Ok(items)
}

/// Parses a single expression.
pub fn parse_expr(text: &str, vars: &[String], params: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
    let items = parse_list(text, vars, params)?;
    if items.len() != 1 {
        return Err(ParseError::ComponentCountMismatch {
            expected: 1,
            found: items.len(),
        });
    }
    Ok(items.into_iter().next().expect("one item"))
}

/// A parsed vector-valued expression, ready to evaluate.
#[derive(Debug, Clone)]
pub struct ExprMap {
    pub components: Vec<Expr>,
    pub vars: Vec<String>,
    pub params: BTreeMap<String, f64>,
}

impl ExprMap {
    pub fn parse(text: &str, vars: Vec<String>, params: BTreeMap<String, f64>, n: usize) -> Result<Self> {
        let components = parse_list(text, &vars, &params)?;
        if components.len() != n {
            return Err(ParseError::ComponentCountMismatch {
                expected: n,
                found: components.len(),
            }
            .into());
        }
        Ok(Self {
            components,
            vars,
            params,
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vector> {
        let vals = self
            .components
            .iter()
            .map(|e| eval_ast(e, x, &self.params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Vector::from_vec(vals))
    }

    pub fn pretty(&self) -> String {
        self.components
            .iter()
            .map(|e| e.pretty(&self.vars).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Variable names u1..um.
pub fn chart_vars(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("u{i}")).collect()
}

/// Parameters every expression may use.
pub fn builtin_params() -> BTreeMap<String, f64> {
    BTreeMap::from([("pi".to_string(), std::f64::consts::PI)])
}

/// Default chart box for parsed immersions.
pub const DEFAULT_BOX: (f64, f64) = (-10.0, 10.0);

/// Immersion u ↦ (expr_1, …, expr_n) over the box [-10, 10]^m.
pub fn parse_immersion(text: &str, m: usize, n: usize) -> Result<ImmersedPatch> {
    let domain = BoxDomain::cube(m, DEFAULT_BOX.0, DEFAULT_BOX.1)?;
    parse_immersion_with(text, m, n, &BTreeMap::new(), domain)
}

/// Immersion with extra named parameters and an explicit chart box.
pub fn parse_immersion_with(
    text: &str,
    m: usize,
    n: usize,
    params: &BTreeMap<String, f64>,
    domain: BoxDomain,
) -> Result<ImmersedPatch> {
    if domain.dim() != m {
        return Err(GeomError::DimensionMismatch {
            expected: m,
            found: domain.dim(),
        });
    }
    let mut all = builtin_params();
    all.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    let map = Arc::new(ExprMap::parse(text, chart_vars(m), all, n)?);
    ImmersedPatch::new(text, m, n, domain, move |u: &Vector| map.eval(u.as_slice()))
}

/// Curve t ↦ (expr_1, …, expr_n) on [t0, t1].
pub fn parse_curve(text: &str, params: &BTreeMap<String, f64>, t0: f64, t1: f64) -> Result<AmbientCurve> {
    let mut all = builtin_params();
    all.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    let vars = vec!["t".to_string()];
    let n = parse_list(text, &vars, &all)?.len();
    let map = Arc::new(ExprMap::parse(text, vars, all, n)?);
    Ok(AmbientCurve::new(move |t| map.eval(&[t]), t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, m: usize) -> Result<Vec<Expr>, ParseError> {
        parse_list(text, &chart_vars(m), &builtin_params())
    }

    fn eval1(text: &str, u: &[f64]) -> Result<f64> {
        let e = parse(text, u.len().max(1)).map_err(GeomError::from)?;
        eval_ast(&e[0], u, &builtin_params())
    }

    #[test]
    fn immersion_examples() {
        let p = parse_immersion("cos(u1), sin(u1), u2", 2, 3).unwrap();
        let x = p.evaluate(&Vector::from_column_slice(&[0.0, 1.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 0.0, 1.0]);
        let p = parse_immersion("u1, u2, u1*u2", 2, 3).unwrap();
        let x = p.evaluate(&Vector::from_column_slice(&[1.0, 2.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn error_positions() {
        assert_eq!(
            parse("cos(u1, u2)", 2).unwrap_err(),
            ParseError::ArityError {
                name: "cos".into(),
                position: 4,
                expected: 1,
                found: 2
            }
        );
        let e = parse("cos(", 1).unwrap_err();
        assert_eq!(e.position(), Some(5));
        assert!(matches!(e, ParseError::SyntaxError { .. }));
        assert_eq!(parse("2u1", 1).unwrap_err().position(), Some(2));
        assert!(matches!(
            parse("u3 + 1", 2).unwrap_err(),
            ParseError::UnknownIdentifier { position: 1, .. }
        ));
        assert!(matches!(
            parse_immersion("u1, u2", 2, 3).unwrap_err(),
            GeomError::Parse(ParseError::ComponentCountMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn evaluation() {
        assert_eq!(eval1("3", &[]).unwrap(), 3.0);
        assert_eq!(eval1("sqrt(u1)", &[4.0]).unwrap(), 2.0);
        assert!(matches!(eval1("log(u1)", &[0.0]), Err(GeomError::NumericalDomain { .. })));
        assert_eq!(eval1("2^3^2", &[]).unwrap(), 512.0);
        assert_eq!(eval1("-2^2", &[]).unwrap(), 4.0);
        assert_eq!(eval1("(-2)^3", &[]).unwrap(), -8.0);
        assert!(eval1("(-2)^0.5", &[]).is_err());
        assert_eq!(eval1("1.5e2 - 50", &[]).unwrap(), 100.0);
        assert_eq!(eval1("8/4/2", &[]).unwrap(), 1.0);
        assert!((eval1("cos(pi)", &[]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pretty_reparses() {
        let vars = chart_vars(2);
        let e = parse("-u1^2 + sin(u2)*3/u1 - -4", 2).unwrap();
        let text = e[0].pretty(&vars).to_string();
        let back = parse(&text, 2).unwrap();
        let u = [0.7, -1.3];
        let p = builtin_params();
        assert_eq!(eval_ast(&e[0], &u, &p).unwrap(), eval_ast(&back[0], &u, &p).unwrap());
    }

    #[test]
    fn curve_expression() {
        let c = parse_curve("cos(t), sin(t), t", &BTreeMap::new(), 0.0, 1.0).unwrap();
        assert_eq!(c.eval(0.0).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
    }
}
