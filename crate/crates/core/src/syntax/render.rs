use super::Formula;

// Binding strength; higher binds tighter.
const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const PRIMARY: u8 = 6;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Not(_) | Formula::Know(..) | Formula::Poss(..) => UNARY,
        Formula::Atom(_) | Formula::Rel(..) => PRIMARY,
    }
}

/// Renders `f` in the ASCII concrete syntax with as few parentheses as the
/// grammar allows, so that parsing the result gives back `f`.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

fn write(f: &Formula, min: u8, out: &mut String) {
    let wrap = level(f) < min;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Not(a) => {
            out.push('~');
            write(a, UNARY, out);
        }
        Formula::Know(j, v, a) | Formula::Poss(j, v, a) => {
            out.push(if matches!(f, Formula::Know(..)) {
                'K'
            } else {
                'P'
            });
            out.push('{');
            out.push_str(j);
            if let Some(v) = v {
                out.push(',');
                out.push_str(v.as_str());
            }
            out.push_str("} ");
            write(a, UNARY, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, AND, AND + 1, out),
        Formula::Or(a, b) => binary(a, " | ", b, OR, OR + 1, out),
        Formula::Imp(a, b) => binary(a, " -> ", b, IMP + 1, IMP, out),
        Formula::Iff(a, b) => binary(a, " <-> ", b, IFF, IFF + 1, out),
        Formula::Rel(a, c) => {
            if let Formula::Rel(..) = **a {
                write(a, PRIMARY, out);
            } else {
                out.push('(');
                write(a, 0, out);
                out.push(')');
            }
            out.push('^');
            out.push_str(c);
        }
    }
    if wrap {
        out.push(')');
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left_min: u8, right_min: u8, out: &mut String) {
    write(a, left_min, out);
    out.push_str(op);
    write(b, right_min, out);
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, Variant};
    use super::*;

    #[test]
    fn single_operator() {
        assert_eq!(
            render_formula(&Formula::know("i", Variant::V11, Formula::atom("a"))),
            "K{i,1.1} a"
        );
        assert_eq!(
            render_formula(&Formula::rel(Formula::atom("p"), "ci")),
            "(p)^ci"
        );
    }

    #[test]
    fn minimal_parentheses() {
        for text in [
            "p -> q -> r",
            "(p -> q) -> r",
            "p <-> q <-> r",
            "p <-> (q <-> r)",
            "p & (q & r)",
            "p | q & r",
            "(p | q) & r",
            "~(p & q)",
            "~~p",
            "K{i} ~P{j,2.1} p",
            "K{i,1.2} (p -> q)",
            "(p)^ck^ci",
            "((p)^ck & q)^ci",
            "~(~p)^ci",
            "(K{j,1.1} K{k,1.1} p -> K{k,1.1} p)^ci",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(render_formula(&f), text);
        }
    }
}
