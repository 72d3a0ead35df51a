//! The catalog through the command line entry point, as the binary sees it.

use nilgeo::cli::run_with;

fn run(args: &[&str]) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(&args, &mut out, &mut err);
    println!("$ nilgeo {}   [exit {code}]", args.join(" "));
    print!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
}

fn main() {
    run(&["catalog", "show", "mu22"]);
    run(&["info", "catalog:mu22?a=3"]);
    run(&["der", "catalog:mu21?branch=-i"]);
    run(&["necessary", "catalog:mu15", "catalog:mu14"]);
    run(&["verify-deg", "catalog:mu15__mu14"]);
    run(&["check-cond", "catalog:lambda6?a=2", "catalog:r_lambda6", "--json"]);
}
