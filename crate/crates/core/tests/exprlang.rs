use ncdc_core::exprlang::{parse, parse_form, parse_scalar, Env, ExprKind, Printable, Value};
use ncdc_core::forms::Calculus;
use ncdc_core::scalar::{Chart, SymbolDecl, SymbolTable, Variance};
use ncdc_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(n: usize) -> SymbolTable {
    let mut t = SymbolTable::new(Chart::new(n).unwrap());
    t.declare(SymbolDecl::scalar("H")).unwrap();
    t.declare(SymbolDecl::scalar("f")).unwrap();
    t.declare(SymbolDecl::scalar("g")).unwrap();
    t.declare(SymbolDecl::new("b", &[Variance::Upper, Variance::Upper]).symmetric(&[0, 1])).unwrap();
    t.declare(SymbolDecl::new("w", &[Variance::Lower, Variance::Lower]).antisymmetric(&[0, 1]).static_in_time())
        .unwrap();
    t.declare(SymbolDecl::new("Gamma", &[Variance::Upper, Variance::Lower, Variance::Lower]).symmetric(&[1, 2]))
        .unwrap();
    t
}

#[test]
fn product_of_derivative_and_symbol() {
    let t = table(2);
    let e = parse("D[1](H)*b[1,1]", &t).unwrap();
    match &e.kind {
        ExprKind::Product(fs) => {
            assert!(matches!(fs[0].kind, ExprKind::Partial(1, _)));
            assert!(matches!(&fs[1].kind, ExprKind::Sym { name, indices } if name == "b" && indices == &[1, 1]));
        }
        k => panic!("unexpected {k:?}"),
    }
}

#[test]
fn d_of_product() {
    let t = table(2);
    let e = parse("d(f*g)", &t).unwrap();
    match &e.kind {
        ExprKind::D(inner) => assert!(matches!(inner.kind, ExprKind::Product(_))),
        k => panic!("unexpected {k:?}"),
    }
}

#[test]
fn xi_is_symmetric() {
    let t = table(2);
    let c = Calculus::general(t.chart().clone());
    assert_eq!(parse_form("xi[2,1]", &t, &c).unwrap(), parse_form("xi[1,2]", &t, &c).unwrap());
}

#[test]
fn canonical_examples() {
    let t = table(2);
    let ch = t.chart().clone();
    let c = Calculus::general(ch.clone());
    assert_eq!(parse_scalar("f - f", &t).unwrap().canonical(&ch), "0");
    assert_eq!(parse_form("dt*dt", &t, &c).unwrap().canonical(&ch), "0");
    assert_eq!(parse_form("d(xi[1,2])", &t, &c).unwrap().canonical(&ch), "dx[1]dx[2] + dx[2]dx[1]");
    assert_eq!(parse_scalar("b[2,1] + b[1,2]", &t).unwrap().canonical(&ch), "2*b[1,2]");
    assert_eq!(parse_scalar("w[2,1] + w[1,2]", &t).unwrap().canonical(&ch), "0");
    assert_eq!(parse_scalar("D[t](w[1,2])", &t).unwrap().canonical(&ch), "0");
}

#[test]
fn latex_examples() {
    let t = table(2);
    let c = Calculus::general(t.chart().clone());
    assert_eq!(parse_form("xi[1,2]", &t, &c).unwrap().latex(&t), "\\xi^{12}");
    assert_eq!(parse_scalar("D[1](H)", &t).unwrap().latex(&t), "\\partial_1 H");
    assert_eq!(parse_scalar("Gamma[1,2,1]", &t).unwrap().latex(&t), "\\Gamma^{1}{}_{12}");
    assert_eq!(parse_scalar("-1/2*x[1]^2", &t).unwrap().latex(&t), "-\\frac{1}{2} \\left(x^{1}\\right)^{2}");
}

#[test]
fn ito_xi_is_specialized() {
    let t = table(1);
    let ito = Calculus::ito(t.chart().clone(), &|a, b| t.s("b", &[a, b])).unwrap();
    let ch = t.chart().clone();
    assert_eq!(parse_form("xi[1,1]", &t, &ito).unwrap().canonical(&ch), "-b[1,1]*dt");
}

/// Random well-formed expression text of a requested degree.
fn gen_expr(rng: &mut impl Rng, n: u8, degree: usize, depth: u32) -> String {
    let idx = |rng: &mut dyn rand::RngCore| rng.random_range(1..=n);
    if degree == 0 {
        let leaf = depth == 0 || rng.random_bool(0.35);
        if leaf {
            return match rng.random_range(0..6) {
                0 => format!("{}", rng.random_range(0..7)),
                1 => format!("{}/{}", rng.random_range(1..5), rng.random_range(2..5)),
                2 => format!("x[{}]", idx(rng)),
                3 => "t".into(),
                4 => ["H", "f", "g"][rng.random_range(0..3)].into(),
                _ => format!("b[{},{}]", idx(rng), idx(rng)),
            };
        }
        return match rng.random_range(0..5) {
            0 => format!("{} + {}", gen_expr(rng, n, 0, depth - 1), gen_expr(rng, n, 0, depth - 1)),
            1 => format!("({})*{}", gen_expr(rng, n, 0, depth - 1), gen_expr(rng, n, 0, depth - 1)),
            2 => format!(
                "D[{}]({})",
                if rng.random_bool(0.2) { "t".to_string() } else { idx(rng).to_string() },
                gen_expr(rng, n, 0, depth - 1)
            ),
            3 => format!("({})^{}", gen_expr(rng, n, 0, depth - 1), rng.random_range(0..3)),
            _ => format!("(-{})", gen_expr(rng, n, 0, depth - 1)),
        };
    }
    if degree == 1 {
        if depth == 0 || rng.random_bool(0.3) {
            return match rng.random_range(0..3) {
                0 => "dt".into(),
                1 => format!("dx[{}]", idx(rng)),
                _ => format!("xi[{},{}]", idx(rng), idx(rng)),
            };
        }
        return match rng.random_range(0..5) {
            0 => format!("{} - {}", gen_expr(rng, n, 1, depth - 1), gen_expr(rng, n, 1, depth - 1)),
            1 => format!("({})*{}", gen_expr(rng, n, 0, depth - 1), gen_expr(rng, n, 1, depth - 1)),
            2 => format!("{}*({})", gen_expr(rng, n, 1, depth - 1), gen_expr(rng, n, 0, depth - 1)),
            3 => format!("d({})", gen_expr(rng, n, 0, depth - 1)),
            _ => format!("bullet({}, {})", gen_expr(rng, n, 1, depth - 1), gen_expr(rng, n, 1, depth - 1)),
        };
    }
    match rng.random_range(0..3) {
        0 => format!(
            "({})({})",
            gen_expr(rng, n, 1, depth.saturating_sub(1)),
            gen_expr(rng, n, 1, depth.saturating_sub(1))
        ),
        1 => format!("d({})", gen_expr(rng, n, 1, depth.saturating_sub(1))),
        _ => format!("{} + ({})*dt dx[1]", gen_expr(rng, n, 2, depth.saturating_sub(1)), gen_expr(rng, n, 0, 1)),
    }
}

#[test]
fn round_trip_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    for n in 1..=3usize {
        let t = table(n);
        let ch = t.chart().clone();
        let c = Calculus::general(ch.clone());
        let env = Env::forms(&t, &c);
        for k in 0..180 {
            let src = gen_expr(&mut rng, n as u8, k % 3, 3);
            let ast = parse(&src, &t).unwrap_or_else(|e| panic!("{src}: {e}"));
            let v = ast.elaborate(&env).unwrap();
            let shown = ast.display(&ch).to_string();
            let v2 = parse(&shown, &t).unwrap().elaborate(&env).unwrap();
            assert_eq!(v, v2, "syntax round trip of {src} via {shown}");
            let Value::Form(f) = v else { panic!("form expected") };
            let text = f.canonical(&ch);
            let f3 = parse(&text, &t).unwrap().elaborate(&env).unwrap().into_form().unwrap();
            // "0" is the zero of every degree.
            if !(f.is_zero() && f3.is_zero()) {
                assert_eq!(f, f3, "value round trip of {src} via {text}");
            }
            assert_eq!(f3.canonical(&ch), text, "canonical text is a fixed point");
            count += 1;
        }
    }
    assert!(count >= 500);
}

#[test]
fn tensor_round_trip() {
    let t = table(2);
    let ch = t.chart().clone();
    let c = Calculus::general(ch.clone());
    let env = Env::forms(&t, &c);
    let v = parse("x[1]*tensor(dx[1], f*dx[2]) - tensor(xi[1,2], dt)*g", &t).unwrap().elaborate(&env).unwrap();
    let Value::Tensor(tt) = &v else { panic!() };
    let back = parse(&tt.canonical(&ch), &t).unwrap().elaborate(&env).unwrap();
    assert_eq!(v, back);
}

fn position_error(src: &str, t: &SymbolTable) -> (usize, usize) {
    match parse(src, t) {
        Err(Error::Parse { line, col, .. }) => (line, col),
        other => panic!("`{src}` should be rejected with a position, got {other:?}"),
    }
}

#[test]
fn invalid_corpus_is_rejected_with_positions() {
    let t = table(2);
    let corpus = [
        "",
        "+",
        "f +",
        "f * * g",
        "(f",
        "f)",
        "b[1]",
        "b[1,2,1]",
        "b[1,3]",
        "b[0,1]",
        "q",
        "D[3](f)",
        "D(f)",
        "D[1](dx[1])",
        "dx[t]",
        "xi[1]",
        "xi[1,2,3]",
        "d(d(d(dx[1])))",
        "dx[1]dx[2]dx[1]dx[2]",
        "f + dx[1]",
        "bullet(dx[1])",
        "bullet(f, g)",
        "wedge(dt, f)",
        "tensor(dx[1], dx[1]dx[2])",
        "dx[1]^2",
        "f^x",
        "f^1/2",
        "3/0",
        "1/",
        "f $ g",
        "b[1,]",
        "x[]",
        "dx[1] + tensor(dt, dt)",
        "H[1]",
    ];
    for src in corpus {
        position_error(src, &t);
    }
    assert_eq!(position_error("f +\n  * g", &t), (2, 3));
    assert_eq!(position_error("b[1,3]", &t), (1, 5));
}

#[test]
fn mutations_never_escape_as_other_errors() {
    let t = table(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alphabet = ['[', ']', '(', ')', ',', '+', '*', '^', '-', '9', 'q', 't', ' '];
    let mut rejected = 0;
    for k in 0..400 {
        let src = gen_expr(&mut rng, 2, k % 3, 2);
        let mut chars: Vec<char> = src.chars().collect();
        let at = rng.random_range(0..chars.len());
        match rng.random_range(0..3) {
            0 => {
                chars.remove(at);
            }
            1 => chars.insert(at, alphabet[rng.random_range(0..alphabet.len())]),
            _ => chars[at] = alphabet[rng.random_range(0..alphabet.len())],
        }
        let mutated: String = chars.into_iter().collect();
        match parse(&mutated, &t) {
            Ok(_) => {}
            Err(Error::Parse { .. }) => rejected += 1,
            Err(e) => panic!("`{mutated}` produced a non-positional error {e:?}"),
        }
    }
    assert!(rejected > 200);
}
