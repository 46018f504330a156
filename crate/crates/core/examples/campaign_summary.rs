use skewpbw_core::campaign::{paper_campaign, CampaignOptions, RowStatus};
use skewpbw_core::catalog::builtin_catalog;
use std::collections::BTreeMap;

fn main() {
    let cat = builtin_catalog();
    let opts = CampaignOptions { jobs: 4, ..Default::default() };
    let rep = paper_campaign(&cat, &opts).unwrap();
    let mut by_section: BTreeMap<(String, String), usize> = BTreeMap::new();
    for r in &rep.rows {
        let key = (r.section.clone(), format!("{:?}", r.status));
        *by_section.entry(key).or_default() += 1;
    }
    for ((sec, status), n) in by_section {
        println!("{sec:24} {status:14} {n}");
    }
    // spot-check a few load-bearing rows
    for (sec, check, bundle) in [
        ("example_f4z2", "sigma-skew CN (bounded)", "f4_z2_sigma6"),
        ("bounded_theorems", "sigma-skew CN (bounded)", "d_char2"),
        ("bounded_theorems", "R right sigma-skew RNP iff A right sigma-bar-skew RNP (bounded)", "f4_z2_sigma6"),
        ("implication_lattice", "a catalog ring separates reflexive from IFP", "m2_z2"),
    ] {
        let row = rep.rows.iter().find(|r| r.section == sec && r.check == check && r.bundle == bundle);
        println!("{sec} | {check} | {bundle} -> {:?}", row.map(|r| (&r.status, &r.detail)));
    }
}
