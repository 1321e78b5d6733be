//! DIMACS CNF text, read with exact-one semantics per clause.

use crate::error::{Error, Result};
use crate::formula::{Formula, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct XDimacsDocument {
    pub num_vars: usize,
    pub num_clauses: usize,
    pub clauses: Vec<Vec<i32>>,
    pub comments: Vec<String>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl XDimacsDocument {
    pub fn from_formula_clauses(num_vars: usize, clauses: &[Vec<Literal>]) -> XDimacsDocument {
        XDimacsDocument {
            num_vars,
            num_clauses: clauses.len(),
            clauses: clauses
                .iter()
                .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
                .collect(),
            comments: Vec::new(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        let clauses: Vec<Vec<Literal>> = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&v| Literal::from_dimacs(v).expect("parsed literals are nonzero"))
                    .collect()
            })
            .collect();
        Formula::with_num_vars(self.num_vars, &clauses)
    }

    /// Writes comments, the header and one clause per line.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            if c.is_empty() {
                out.push_str("c\n");
            } else {
                out.push_str(&format!("c {c}\n"));
            }
        }
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&format!("{lit} "));
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses a document; also returns warnings for recoverable problems.
pub fn parse_with_warnings(input: &str) -> Result<(XDimacsDocument, Vec<String>)> {
    let mut doc = XDimacsDocument::default();
    let mut warnings = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "c" || line.starts_with("c ") || line.starts_with("c\t") {
            doc.comments.push(line[1..].trim().to_string());
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_error(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [_, "cnf", n, m] = fields.as_slice() else {
                return Err(parse_error(lineno, format!("malformed header {line:?}")));
            };
            let n = n
                .parse::<usize>()
                .map_err(|_| parse_error(lineno, format!("bad variable count {n:?}")))?;
            let m = m
                .parse::<usize>()
                .map_err(|_| parse_error(lineno, format!("bad clause count {m:?}")))?;
            if n > i32::MAX as usize {
                return Err(parse_error(lineno, "variable count too large"));
            }
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(parse_error(lineno, "clause before the `p cnf` header"));
        };
        for token in line.split_whitespace() {
            let lit: i32 = token
                .parse()
                .map_err(|_| parse_error(lineno, format!("not an integer: {token:?}")))?;
            if lit == 0 {
                if token.starts_with('-') {
                    return Err(parse_error(lineno, "literal -0"));
                }
                doc.clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > n {
                    return Err(parse_error(
                        lineno,
                        format!("literal {lit} out of range for {n} variables"),
                    ));
                }
                current.push(lit);
            }
        }
        last_line = lineno;
    }
    let Some((n, m)) = header else {
        return Err(parse_error(input.lines().count().max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(parse_error(last_line, "final clause is not terminated by 0"));
    }
    if doc.clauses.len() != m {
        warnings.push(format!(
            "header declares {m} clauses, found {}",
            doc.clauses.len()
        ));
    }
    doc.num_vars = n;
    doc.num_clauses = doc.clauses.len();
    Ok((doc, warnings))
}

pub fn parse(input: &str) -> Result<XDimacsDocument> {
    parse_with_warnings(input).map(|(doc, _)| doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_document() {
        let doc = parse("p cnf 3 1\n1 2 3 0").unwrap();
        assert_eq!(doc.clauses, vec![vec![1, 2, 3]]);
        let f = doc.to_formula();
        assert_eq!(f.num_clauses(), 1);
        assert_eq!(f.num_vars(), 3);
    }

    #[test]
    fn negative_literal() {
        let doc = parse("c hi\np cnf 2 1\n1\n -2 0\n").unwrap();
        assert_eq!(doc.clauses, vec![vec![1, -2]]);
        assert_eq!(doc.comments, vec!["hi".to_string()]);
        let f = doc.to_formula();
        let c = f.clause(crate::formula::ClauseId(0)).unwrap();
        assert!(c.contains(Literal::from_dimacs(-2).unwrap()));
    }

    #[test]
    fn errors() {
        let e = parse("p cnf 2 1\n1 3 0").unwrap_err();
        assert!(e.to_string().contains("out of range"), "{e}");
        assert!(parse("1 2 0").is_err());
        assert!(parse("").is_err());
        assert!(parse("p cnf 2 1\n1 -0").is_err());
        assert!(parse("p cnf 2 1\n1 2").is_err());
        assert!(parse("p cnf 2 1\np cnf 2 1\n1 2 0").is_err());
        assert!(parse("p cnf 2 1\n1 x 0").is_err());
        assert!(parse("p dnf 2 1\n1 2 0").is_err());
    }

    #[test]
    fn count_mismatch_is_a_warning() {
        let (doc, warnings) = parse_with_warnings("p cnf 3 2\n1 2 3 0").unwrap();
        assert_eq!(doc.clauses.len(), 1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn empty_clause() {
        let doc = parse("p cnf 1 1\n0\n").unwrap();
        assert_eq!(doc.clauses, vec![Vec::<i32>::new()]);
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(
            n in 1usize..30,
            raw in proptest::collection::vec(proptest::collection::vec((1i32..30, any::<bool>()), 0..6), 0..12),
            comments in proptest::collection::vec("[a-z][a-z ]{0,10}[a-z]", 0..3),
        ) {
            let clauses: Vec<Vec<i32>> = raw
                .into_iter()
                .map(|c| c.into_iter().map(|(v, neg)| {
                    let v = (v - 1) % n as i32 + 1;
                    if neg { -v } else { v }
                }).collect())
                .collect();
            let doc = XDimacsDocument {
                num_vars: n,
                num_clauses: clauses.len(),
                clauses,
                comments,
            };
            prop_assert_eq!(parse(&doc.emit()).unwrap(), doc);
        }
    }
}
