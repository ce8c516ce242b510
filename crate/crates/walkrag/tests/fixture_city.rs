mod common;

use walkrag::eval::{load_dataset, run_eval};

#[test]
fn eval_report_smoke() {
    let engine = common::fixture_engine();
    let records = load_dataset(std::fs::File::open(common::fixture_path("eval.jsonl")).unwrap()).unwrap();
    let report = run_eval(&engine, &records);
    println!("{}", report.table());
}
