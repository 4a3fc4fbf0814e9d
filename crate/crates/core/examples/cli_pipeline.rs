// Drive the `soliton` command line in-process and collect its outputs.

use ricci_soliton::cli::{run_with_io, LogLevel};

fn soliton(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("soliton").chain(args.iter().copied());
    let code = run_with_io(argv, &mut out, &mut err, LogLevel::Info);
    eprint!("{}", String::from_utf8_lossy(&err));
    assert_eq!(code, 0);
    String::from_utf8(out).unwrap()
}

fn main() {
    print!("{}", soliton(&["classify", "--lambda", "0", "--mu", "-1", "--a0", "1", "--format", "json"]));
    print!("{}", soliton(&["catalog", "--family", "g6", "--nu", "3.14159", "--format", "json"]));
    print!("{}", soliton(&["metric", "--family", "g1", "--nu", "1", "--samples", "5"]));
    print!("{}", soliton(&["energy", "--family", "g7", "--format", "json"]));
}
