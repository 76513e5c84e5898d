use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use waypath_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let status = unsafe { wp_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()) };
    assert_eq!(status, WpStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn theta_sign_and_errors() {
    let mut theta = f64::NAN;
    let s = unsafe { wp_theta_single(110.0, 0.0, 100.0, 10.0, &mut theta) };
    assert_eq!(s, WpStatus::Ok);
    assert!((theta - 45.0).abs() < 1e-9);
    assert_eq!(last_error(), "");

    let s = unsafe { wp_theta_single(110.0, 10.0, 100.0, 10.0, &mut theta) };
    assert_eq!(s, WpStatus::Degenerate);
    assert!(last_error().contains("undefined heading"));

    let s = unsafe { wp_theta_single(1.0, 0.0, 0.0, 1.0, ptr::null_mut()) };
    assert_eq!(s, WpStatus::NullArgument);

    let s = unsafe { wp_theta_multi(100.0, 0.0, 100.0, 100.0, 90.0, 0.0, &mut theta) };
    assert_eq!(s, WpStatus::Ok);
    assert!(theta < 0.0);
}

#[test]
fn steer_duration() {
    let (mut dir, mut dur) = (WpDirection::Straight, 0.0);
    assert_eq!(unsafe { wp_steer(-90.0, &mut dir, &mut dur) }, WpStatus::Ok);
    assert_eq!(dir, WpDirection::Left);
    assert!((dur - 90.0 / 23.0).abs() < 1e-12);
    assert_eq!(
        unsafe { wp_steer(f64::INFINITY, &mut dir, &mut dur) },
        WpStatus::InvalidArgument
    );
}

#[test]
fn grid_handle_lifecycle() {
    let mut grid = ptr::null_mut();
    assert_eq!(unsafe { wp_grid_new(3, 3, 10.0, &mut grid) }, WpStatus::Ok);
    let (mut cost, mut ops) = (0.0, 0u64);
    assert_eq!(
        unsafe { wp_grid_dijkstra(grid, 0, 0, 2, 2, &mut cost, &mut ops) },
        WpStatus::Ok
    );
    assert!((cost - 20.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    assert!(ops > 0);
    for (c, r) in [(0, 1), (1, 1), (2, 1)] {
        assert_eq!(unsafe { wp_grid_set_blocked(grid, c, r, true) }, WpStatus::Ok);
    }
    assert_eq!(
        unsafe { wp_grid_dijkstra(grid, 0, 0, 2, 2, &mut cost, &mut ops) },
        WpStatus::Unreachable
    );
    assert_eq!(
        unsafe { wp_grid_set_blocked(grid, 3, 0, true) },
        WpStatus::InvalidArgument
    );
    unsafe { wp_grid_free(grid) };
    unsafe { wp_grid_free(ptr::null_mut()) };

    let text = CString::new("2 1 5\n.#\n").unwrap();
    assert_eq!(unsafe { wp_grid_parse(text.as_ptr(), &mut grid) }, WpStatus::Ok);
    unsafe { wp_grid_free(grid) };
    let bad = CString::new("2 1\n").unwrap();
    assert_eq!(unsafe { wp_grid_parse(bad.as_ptr(), &mut grid) }, WpStatus::Parse);
}

#[test]
fn wire_round_trip() {
    let mut buf = [0 as c_char; 64];
    let mut written = 0usize;
    let s = unsafe {
        wp_wire_encode(
            WpMessageKind::Theta,
            -45.0,
            ptr::null(),
            buf.as_mut_ptr(),
            buf.len(),
            &mut written,
        )
    };
    assert_eq!(s, WpStatus::Ok);
    let line = unsafe { CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(line.to_str().unwrap(), "THETA -45.000000\n");
    assert_eq!(written, 17);

    let (mut kind, mut value) = (WpMessageKind::Done, 0.0);
    assert_eq!(
        unsafe { wp_wire_decode(line.as_ptr(), &mut kind, &mut value, ptr::null_mut(), 0) },
        WpStatus::Ok
    );
    assert_eq!((kind, value), (WpMessageKind::Theta, -45.0));

    let mut small = [0 as c_char; 4];
    let s = unsafe {
        wp_wire_encode(
            WpMessageKind::Done,
            0.0,
            ptr::null(),
            small.as_mut_ptr(),
            small.len(),
            &mut written,
        )
    };
    assert_eq!(s, WpStatus::BufferTooSmall);
    assert_eq!(written, 5);

    let err = CString::new("ERROR motor stalled").unwrap();
    let mut text = [0 as c_char; 32];
    let s = unsafe { wp_wire_decode(err.as_ptr(), &mut kind, &mut value, text.as_mut_ptr(), text.len()) };
    assert_eq!(s, WpStatus::Ok);
    assert_eq!(kind, WpMessageKind::Error);
    assert_eq!(
        unsafe { CStr::from_ptr(text.as_ptr()) }.to_str().unwrap(),
        "motor stalled"
    );

    let junk = CString::new("HELLO").unwrap();
    assert_eq!(
        unsafe { wp_wire_decode(junk.as_ptr(), &mut kind, &mut value, ptr::null_mut(), 0) },
        WpStatus::Protocol
    );
    let s = unsafe {
        wp_wire_encode(
            WpMessageKind::Range,
            -1.0,
            ptr::null(),
            buf.as_mut_ptr(),
            buf.len(),
            ptr::null_mut(),
        )
    };
    assert_eq!(s, WpStatus::InvalidArgument);
}

#[test]
fn mission_through_handles() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/one_obstacle.json");
    let path = CString::new(path.to_str().unwrap()).unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { wp_scenario_load(path.as_ptr(), &mut scenario) }, WpStatus::Ok);
    let mut mission = ptr::null_mut();
    assert_eq!(unsafe { wp_mission_run(scenario, &mut mission) }, WpStatus::Ok);

    let (mut outcome, mut elapsed, mut length) = (WpOutcome::Timeout, 0.0, 0.0);
    assert_eq!(
        unsafe { wp_mission_summary(mission, &mut outcome, &mut elapsed, &mut length) },
        WpStatus::Ok
    );
    assert_eq!(outcome, WpOutcome::Done);
    assert!(elapsed > 0.0 && length <= 550.0);

    let mut count = 0;
    assert_eq!(unsafe { wp_mission_sample_count(mission, &mut count) }, WpStatus::Ok);
    assert!(count > 2);
    let mut sample = WpSample {
        t_s: 0.0,
        x_cm: 0.0,
        y_cm: 0.0,
        heading_deg: 0.0,
        phase: WpPhase::Avoiding,
    };
    assert_eq!(
        unsafe { wp_mission_sample(mission, count - 1, &mut sample) },
        WpStatus::Ok
    );
    assert_eq!(sample.phase, WpPhase::Done);
    assert!((sample.t_s - elapsed).abs() < 1e-9);
    assert_eq!(
        unsafe { wp_mission_sample(mission, count, &mut sample) },
        WpStatus::InvalidArgument
    );

    unsafe {
        wp_mission_free(mission);
        wp_scenario_free(scenario);
    }
}

#[test]
fn scenario_errors_map_to_codes() {
    let mut scenario = ptr::null_mut();
    let missing = CString::new("/nonexistent/x.json").unwrap();
    assert_eq!(
        unsafe { wp_scenario_load(missing.as_ptr(), &mut scenario) },
        WpStatus::NotFound
    );
    let bad = CString::new("{\n\"robot\": }").unwrap();
    assert_eq!(
        unsafe { wp_scenario_from_json(bad.as_ptr(), &mut scenario) },
        WpStatus::Parse
    );
    assert!(last_error().contains("line 2"));
    assert!(scenario.is_null());
    assert_eq!(
        unsafe { wp_mission_run(ptr::null(), &mut ptr::null_mut()) },
        WpStatus::NullArgument
    );
}
