mod common;

use common::criteria;

#[test]
fn balancing_agrees_on_random_trees() {
    let r = criteria::bali(300, 11);
    println!("{r}");
    assert!(r.ok(), "{r}");
    // The equations cover every tree.
    assert_eq!(r.match_failed, 0, "{r}");
}
