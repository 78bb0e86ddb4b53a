use core::fmt::{self, Display, Formatter, Write};

use super::{Expr, ExprKind};

// Binding levels: 0 = sum, 1 = product, 2 = postfix.
fn write_at(e: &Expr, level: u8, f: &mut Formatter<'_>) -> fmt::Result {
    let own = match e.kind() {
        ExprKind::Sum(..) => 0,
        ExprKind::Prod(..) => 1,
        _ => 2,
    };
    if own < level {
        f.write_char('(')?;
        write_at(e, 0, f)?;
        return f.write_char(')');
    }
    match e.kind() {
        ExprKind::Act(s) | ExprKind::Prop(s) => f.write_str(s.name()),
        ExprKind::Zero => f.write_char('0'),
        ExprKind::One => f.write_char('1'),
        ExprKind::Sum(l, r) => {
            write_at(l, 0, f)?;
            f.write_str(" + ")?;
            write_at(r, 1, f)
        }
        ExprKind::Prod(l, r) => {
            write_at(l, 1, f)?;
            f.write_char(';')?;
            write_at(r, 2, f)
        }
        ExprKind::Star(b) => {
            write_at(b, 2, f)?;
            f.write_char('*')
        }
        ExprKind::Anti(b) => {
            f.write_str("adom(")?;
            write_at(b, 0, f)?;
            f.write_char(')')
        }
        ExprKind::Dom(b) => {
            f.write_str("dom(")?;
            write_at(b, 0, f)?;
            f.write_char(')')
        }
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}
