//! Regenerates the fixture plates under `fixtures/`.
//!
//! Run with `cargo run -p biteplan --example author_fixtures`. Toppings are
//! placed on the computed densest point of the food beneath them, so the
//! fixtures stay consistent with the density model.

use std::fs;
use std::path::{Path, PathBuf};

use biteplan::geometry::densest_point;
use biteplan::plate::{save_fixture, FoodCategory, FoodItem, FoodMask, Pixel, PlateObservation, PlateState};
use biteplan::PlannerConfig;

const W: u32 = 200;
const H: u32 = 200;

fn disc(cx: i32, cy: i32, r: i32) -> FoodMask {
    FoodMask::from_fn(W, H, |p| p.dist2(Pixel::new(cx, cy)) <= i64::from(r * r))
}

fn rect(x0: i32, y0: i32, w: i32, h: i32) -> FoodMask {
    FoodMask::from_fn(W, H, |p| (x0..x0 + w).contains(&p.x) && (y0..y0 + h).contains(&p.y))
}

/// Rectangle of `len` x `wid` pixels centred on (cx, cy), rotated by `deg`.
fn bar(cx: f64, cy: f64, len: f64, wid: f64, deg: f64) -> FoodMask {
    let (s, c) = deg.to_radians().sin_cos();
    FoodMask::from_fn(W, H, |p| {
        let (dx, dy) = (f64::from(p.x) - cx, f64::from(p.y) - cy);
        let t = dx * c + dy * s;
        let n = -dx * s + dy * c;
        t.abs() <= len / 2.0 && n.abs() <= wid / 2.0
    })
}

/// Strand of width `wid` from `a` to `b`.
fn strand(a: (f64, f64), b: (f64, f64), wid: f64) -> FoodMask {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    FoodMask::from_fn(W, H, |p| {
        let (px, py) = (f64::from(p.x), f64::from(p.y));
        let t = (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0);
        let (qx, qy) = (a.0 + t * dx - px, a.1 + t * dy - py);
        qx * qx + qy * qy <= wid * wid / 4.0
    })
}

fn union(masks: &[FoodMask]) -> FoodMask {
    let mut out = FoodMask::new(W, H);
    for m in masks {
        for p in m.pixels() {
            out.set(p, true);
        }
    }
    out
}

fn item(id: u32, label: &str, category: FoodCategory, mask: FoodMask) -> FoodItem {
    FoodItem {
        instance_id: id,
        label: label.into(),
        category,
        mask,
    }
}

fn plate(items: Vec<FoodItem>, preference: Option<&str>) -> PlateState {
    let mut state = PlateState::new(PlateObservation {
        width: W,
        height: H,
        px_per_mm: 2.0,
        items,
        frame_id: 0,
    })
    .expect("authored plate is valid");
    state.preference = preference.map(str::to_string);
    state
}

fn peak(mask: &FoodMask) -> Pixel {
    densest_point(mask, PlannerConfig::default().sigma).expect("non-empty")
}

fn dense_spaghetti() -> FoodMask {
    union(&[disc(100, 100, 42), disc(75, 118, 22), disc(124, 80, 20)])
}

/// Loose lattice of fettuccine strands: sparse but spread out.
fn fettuccine_nest() -> FoodMask {
    let mut strands = Vec::new();
    for k in 0..4 {
        let y = 45.0 + 30.0 * f64::from(k);
        strands.push(strand((40.0, y), (165.0, y + 8.0), 4.0));
    }
    for k in 0..4 {
        let x = 55.0 + 35.0 * f64::from(k);
        strands.push(strand((x, 35.0), (x - 6.0, 160.0), 4.0));
    }
    union(&strands)
}

fn spaghetti_meatballs(preference: Option<&str>) -> PlateState {
    let bed = dense_spaghetti();
    let top = peak(&bed);
    plate(
        vec![
            item(1, "spaghetti", FoodCategory::Noodles, bed),
            item(2, "meatball", FoodCategory::MeatSeafood, disc(top.x, top.y, 8)),
            item(3, "meatball", FoodCategory::MeatSeafood, disc(68, 132, 8)),
            item(4, "meatball", FoodCategory::MeatSeafood, disc(160, 150, 8)),
        ],
        preference,
    )
}

fn fettuccine_chicken_broccoli() -> PlateState {
    let nest = fettuccine_nest();
    let top = peak(&nest);
    plate(
        vec![
            item(1, "fettuccine", FoodCategory::Noodles, nest),
            item(2, "chicken", FoodCategory::MeatSeafood, disc(top.x, top.y, 9)),
            item(3, "broccoli", FoodCategory::Vegetable, disc(22, 182, 10)),
            item(4, "broccoli", FoodCategory::Vegetable, disc(182, 182, 10)),
        ],
        None,
    )
}

fn mashed_potatoes_sausage() -> PlateState {
    let potatoes = disc(95, 100, 40);
    let top = peak(&potatoes);
    plate(
        vec![
            item(1, "mashed potatoes", FoodCategory::Semisolid, potatoes),
            item(
                2,
                "sausage",
                FoodCategory::MeatSeafood,
                bar(f64::from(top.x), f64::from(top.y), 30.0, 10.0, 20.0),
            ),
            item(
                3,
                "sausage",
                FoodCategory::MeatSeafood,
                bar(165.0, 60.0, 30.0, 10.0, 70.0),
            ),
            item(
                4,
                "sausage",
                FoodCategory::MeatSeafood,
                bar(160.0, 160.0, 30.0, 10.0, 120.0),
            ),
        ],
        None,
    )
}

fn oatmeal_strawberries() -> PlateState {
    plate(
        vec![
            item(1, "oatmeal", FoodCategory::Semisolid, disc(100, 100, 45)),
            item(2, "strawberry", FoodCategory::Fruit, disc(70, 72, 9)),
            item(3, "strawberry", FoodCategory::Fruit, disc(132, 78, 9)),
            item(4, "strawberry", FoodCategory::Fruit, disc(128, 134, 9)),
            item(5, "blueberry", FoodCategory::Fruit, disc(64, 130, 5)),
            item(6, "blueberry", FoodCategory::Fruit, disc(76, 140, 5)),
        ],
        None,
    )
}

fn appetizer() -> PlateState {
    plate(
        vec![
            item(1, "carrot", FoodCategory::Vegetable, bar(45.0, 40.0, 34.0, 8.0, 10.0)),
            item(2, "carrot", FoodCategory::Vegetable, bar(50.0, 62.0, 34.0, 8.0, -5.0)),
            item(3, "carrot", FoodCategory::Vegetable, bar(48.0, 84.0, 34.0, 8.0, 15.0)),
            item(4, "celery", FoodCategory::Vegetable, bar(140.0, 40.0, 36.0, 9.0, 80.0)),
            item(5, "celery", FoodCategory::Vegetable, bar(160.0, 42.0, 36.0, 9.0, 95.0)),
            item(6, "chicken nugget", FoodCategory::MeatSeafood, disc(60, 150, 12)),
            item(7, "chicken nugget", FoodCategory::MeatSeafood, disc(95, 160, 12)),
            item(8, "ranch", FoodCategory::Sauce, disc(110, 100, 16)),
            item(9, "bbq sauce", FoodCategory::Sauce, disc(155, 145, 15)),
        ],
        None,
    )
}

fn dessert() -> PlateState {
    plate(
        vec![
            item(1, "banana", FoodCategory::Cuttable, rect(30, 30, 121, 14)),
            item(2, "brownie", FoodCategory::Cuttable, rect(40, 70, 31, 22)),
            item(3, "brownie", FoodCategory::Cuttable, rect(90, 70, 31, 22)),
            item(4, "strawberry", FoodCategory::Fruit, disc(60, 135, 9)),
            item(5, "strawberry", FoodCategory::Fruit, disc(90, 140, 9)),
            item(6, "nutella", FoodCategory::Sauce, disc(160, 110, 15)),
            item(7, "whipped cream", FoodCategory::Sauce, disc(150, 165, 15)),
        ],
        None,
    )
}

/// One decision-tree case: a plate plus the hand-derived sequence for one item.
struct Case {
    name: &'static str,
    state: PlateState,
    expect: Vec<(u32, &'static str)>,
}

fn case(name: &'static str, items: Vec<FoodItem>, expect: Vec<(u32, &'static str)>) -> Case {
    Case {
        name,
        state: plate(items, None),
        expect,
    }
}

fn tree_cases() -> Vec<Case> {
    use FoodCategory::*;
    let dense = dense_spaghetti();
    let dense_top = peak(&dense);
    let nest = fettuccine_nest();
    let nest_top = peak(&nest);
    let potatoes = disc(100, 100, 40);
    let pot_top = peak(&potatoes);
    let short = strand((60.0, 100.0), (100.0, 108.0), 3.0);
    vec![
        case(
            "broccoli_isolated",
            vec![item(1, "broccoli", Vegetable, disc(100, 100, 12))],
            vec![(1, "skewer")],
        ),
        case(
            "strawberry_isolated",
            vec![item(1, "strawberry", Fruit, disc(60, 60, 9))],
            vec![(1, "skewer")],
        ),
        case(
            "shrimp_isolated",
            vec![item(1, "shrimp", MeatSeafood, bar(100.0, 100.0, 28.0, 10.0, 30.0))],
            vec![(1, "skewer")],
        ),
        case(
            "ranch_sauce",
            vec![item(1, "ranch", Sauce, disc(100, 100, 15))],
            vec![(1, "dip")],
        ),
        case(
            "spaghetti_dense",
            vec![item(1, "spaghetti", Noodles, dense.clone())],
            vec![(1, "twirl")],
        ),
        case(
            "spaghetti_dense_meatball_on_peak",
            vec![
                item(1, "spaghetti", Noodles, dense.clone()),
                item(2, "meatball", MeatSeafood, disc(dense_top.x, dense_top.y, 8)),
            ],
            vec![(1, "push,twirl"), (2, "skewer")],
        ),
        case(
            "spaghetti_dense_meatball_on_rim",
            vec![
                item(1, "spaghetti", Noodles, dense.clone()),
                item(2, "meatball", MeatSeafood, disc(68, 132, 8)),
            ],
            vec![(1, "twirl")],
        ),
        case(
            "spaghetti_dense_meatball_off_plate_food",
            vec![
                item(1, "spaghetti", Noodles, dense.clone()),
                item(2, "meatball", MeatSeafood, disc(180, 180, 8)),
            ],
            vec![(1, "twirl")],
        ),
        case(
            "spaghetti_dense_sauce_near_peak",
            vec![
                item(1, "spaghetti", Noodles, dense.clone()),
                item(2, "marinara", Sauce, disc(dense_top.x + 10, dense_top.y, 10)),
            ],
            vec![(1, "twirl"), (2, "dip")],
        ),
        case(
            "fettuccine_spread",
            vec![item(1, "fettuccine", Noodles, nest.clone())],
            vec![(1, "group,twirl")],
        ),
        case(
            "fettuccine_spread_chicken_on_peak",
            vec![
                item(1, "fettuccine", Noodles, nest.clone()),
                item(2, "chicken", MeatSeafood, disc(nest_top.x, nest_top.y, 9)),
            ],
            vec![(1, "push,group,twirl"), (2, "skewer")],
        ),
        case(
            "fettuccine_spread_chicken_aside",
            vec![
                item(1, "fettuccine", Noodles, nest.clone()),
                item(2, "chicken", MeatSeafood, disc(178, 20, 9)),
            ],
            vec![(1, "group,twirl")],
        ),
        case(
            "noodle_scrap",
            vec![item(1, "ramen", Noodles, short.clone())],
            vec![(1, "twirl")],
        ),
        case(
            "noodle_scrap_under_mushroom",
            vec![
                item(1, "ramen", Noodles, short.clone()),
                item(2, "mushroom", Vegetable, disc(80, 104, 6)),
            ],
            vec![(1, "push,twirl"), (2, "skewer")],
        ),
        case(
            "noodle_scrap_mushroom_apart",
            vec![
                item(1, "ramen", Noodles, short.clone()),
                item(2, "mushroom", Vegetable, disc(150, 40, 6)),
            ],
            vec![(1, "twirl")],
        ),
        case(
            "mashed_potatoes_plain",
            vec![item(1, "mashed potatoes", Semisolid, potatoes.clone())],
            vec![(1, "scoop")],
        ),
        case(
            "mashed_potatoes_sausage_on_peak",
            vec![
                item(1, "mashed potatoes", Semisolid, potatoes.clone()),
                item(
                    2,
                    "sausage",
                    MeatSeafood,
                    bar(f64::from(pot_top.x), f64::from(pot_top.y), 30.0, 10.0, 20.0),
                ),
            ],
            vec![(1, "push,scoop"), (2, "skewer")],
        ),
        case(
            "mashed_potatoes_sausage_on_edge",
            vec![
                item(1, "mashed potatoes", Semisolid, potatoes.clone()),
                item(2, "sausage", MeatSeafood, bar(100.0, 66.0, 30.0, 10.0, 0.0)),
            ],
            vec![(1, "scoop")],
        ),
        case(
            "oatmeal_thin_smear",
            vec![item(
                1,
                "oatmeal",
                Semisolid,
                strand((40.0, 150.0), (160.0, 140.0), 5.0),
            )],
            vec![(1, "scoop")],
        ),
        case(
            "banana_whole",
            vec![item(1, "banana", Cuttable, rect(30, 90, 121, 14))],
            vec![(1, "cut,skewer")],
        ),
        case(
            "banana_slice",
            vec![item(1, "banana", Cuttable, rect(80, 90, 31, 14))],
            vec![(1, "skewer")],
        ),
        case(
            "banana_diagonal",
            vec![item(1, "banana", Cuttable, bar(100.0, 100.0, 100.0, 14.0, 45.0))],
            vec![(1, "cut,skewer")],
        ),
        case(
            "brownie_bite",
            vec![item(1, "brownie", Cuttable, rect(60, 60, 31, 22))],
            vec![(1, "skewer")],
        ),
        case(
            "mixed_plate",
            vec![
                item(1, "spaghetti", Noodles, disc(70, 70, 35)),
                item(2, "banana", Cuttable, rect(40, 150, 121, 14)),
                item(3, "grape", Fruit, disc(170, 60, 7)),
                item(4, "pudding", Semisolid, disc(150, 110, 22)),
            ],
            vec![(1, "twirl"), (2, "cut,skewer"), (3, "skewer"), (4, "scoop")],
        ),
    ]
}

fn write_plate(dir: &Path, name: &str, state: &PlateState) {
    let path = dir.join(format!("{name}.txt"));
    save_fixture(state, &path).expect("write fixture");
    println!("wrote {}", path.display());
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let plates = root.join("plates");
    let tree = root.join("tree");
    let pref = root.join("preference");
    for d in [&plates, &tree, &pref] {
        fs::create_dir_all(d).expect("create fixture dir");
    }

    write_plate(&plates, "spaghetti_meatballs", &spaghetti_meatballs(None));
    write_plate(&plates, "fettuccine_chicken_broccoli", &fettuccine_chicken_broccoli());
    write_plate(&plates, "mashed_potatoes_sausage", &mashed_potatoes_sausage());
    write_plate(&plates, "oatmeal_strawberries", &oatmeal_strawberries());
    write_plate(&plates, "appetizer", &appetizer());
    write_plate(&plates, "dessert", &dessert());
    write_plate(
        &pref,
        "spaghetti_no_meatballs",
        &spaghetti_meatballs(Some("Please don't feed me meatballs")),
    );

    let mut expected = String::from("# fixture item expected-sequence\n");
    for (i, c) in tree_cases().iter().enumerate() {
        let name = format!("{:02}_{}", i + 1, c.name);
        write_plate(&tree, &name, &c.state);
        for (id, seq) in &c.expect {
            expected.push_str(&format!("{name} {id} {seq}\n"));
        }
    }
    fs::write(tree.join("expected.tsv"), expected).expect("write expectations");
}
