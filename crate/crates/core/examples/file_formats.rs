//! CSV pixel table to SSC1 scene to SWD1 window dataset, and back.

use spatial_c45::data::{extract_windows, load_scene, read_dataset, scene_from_csv, write_dataset, write_scene};

const CSV: &str = "\
# classes: water,crop
row,col,label,b1,b2
0,0,1,10,3
0,1,1,11,3
0,2,2,40,9
1,0,1,12,2
1,1,2,41,8
1,2,2,44,9
2,0,0,13,3
2,1,2,42,9
2,2,2,43,8
";

fn main() -> spatial_c45::Result<()> {
    let dir = std::env::temp_dir().join("sdt-file-formats");
    std::fs::create_dir_all(&dir)?;

    let scene = scene_from_csv(CSV, "toy")?;
    let scene_path = dir.join("toy.ssc");
    write_scene(&scene_path, &scene)?;
    let loaded = load_scene(&scene_path)?;
    println!(
        "{}: {} bytes, {} bands, {}x{}, classes {:?}, {} labelled",
        scene_path.display(),
        std::fs::metadata(&scene_path)?.len(),
        loaded.n_attributes(),
        loaded.rows(),
        loaded.cols(),
        loaded.class_names(),
        loaded.labeled_count()
    );

    let windows = extract_windows(&loaded, 3)?;
    let ds_path = dir.join("toy.swd");
    write_dataset(&ds_path, &windows)?;
    let back = read_dataset(&ds_path)?;
    println!(
        "{}: {} windows of side {}",
        ds_path.display(),
        back.len(),
        back.window()
    );
    let w = &back.instances[0];
    println!("centre window band 1: {:?}", w.channel(0));
    Ok(())
}
