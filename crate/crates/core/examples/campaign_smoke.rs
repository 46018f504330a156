use skewpbw_core::campaign::{paper_campaign, CampaignOptions};
use skewpbw_core::catalog::builtin_catalog;

fn main() {
    let cat = builtin_catalog();
    let opts = CampaignOptions { jobs: 4, ..Default::default() };
    let start = std::time::Instant::now();
    match paper_campaign(&cat, &opts) {
        Ok(rep) => {
            println!("rows: {}", rep.rows.len());
            println!("counterexamples: {}", rep.counterexamples);
            println!("candidates: {}", rep.candidates);
            println!("elapsed: {:?}", start.elapsed());
            for r in rep.rows.iter().filter(|r| matches!(r.status, skewpbw_core::campaign::RowStatus::Counterexample | skewpbw_core::campaign::RowStatus::Candidate)) {
                println!("BAD: {} | {} | {} | {}", r.section, r.check, r.bundle, r.detail);
            }
        }
        Err(e) => println!("ERROR: {e}"),
    }
}
