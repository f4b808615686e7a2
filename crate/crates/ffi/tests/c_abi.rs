use std::ffi::{CStr, CString};
use std::ptr;

use echoaug_ffi::*;

fn image(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> *mut EaImage {
    let data: Vec<u8> = (0..w * h).map(|i| f(i % w, i / w)).collect();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ea_image_from_u8(data.as_ptr(), w, h, &mut out) }, EaStatus::Ok);
    out
}

fn mask(w: usize, h: usize, f: impl Fn(usize, usize) -> bool) -> *mut EaMask {
    let data: Vec<u8> = (0..w * h).map(|i| u8::from(f(i % w, i / w)) * 255).collect();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ea_mask_from_u8(data.as_ptr(), w, h, &mut out) }, EaStatus::Ok);
    out
}

fn last_error() -> String {
    let p = ea_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ea_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn image_round_trips_through_handles() {
    let img = image(7, 5, |x, y| (x * 30 + y) as u8);
    let (mut w, mut h) = (0, 0);
    assert_eq!(unsafe { ea_image_dims(img, &mut w, &mut h) }, EaStatus::Ok);
    assert_eq!((w, h), (7, 5));
    let mut buf = vec![0u8; 35];
    assert_eq!(unsafe { ea_image_to_u8(img, buf.as_mut_ptr(), buf.len()) }, EaStatus::Ok);
    assert_eq!(buf[8], 31);
    let mut small = vec![0u8; 10];
    assert_eq!(unsafe { ea_image_to_u8(img, small.as_mut_ptr(), small.len()) }, EaStatus::InvalidArgument);
    unsafe { ea_image_free(img) };
}

#[test]
fn dice_and_iou_hand_counts() {
    let a = mask(4, 2, |_, y| y == 0);
    let b = mask(4, 2, |x, y| (y == 0 && x >= 2) || (y == 1 && x < 2));
    let (mut d, mut j) = (0.0, 0.0);
    assert_eq!(unsafe { ea_dice(a, b, &mut d) }, EaStatus::Ok);
    assert_eq!(unsafe { ea_iou(a, b, &mut j) }, EaStatus::Ok);
    assert_eq!(d, 0.5);
    assert!((j - 1.0 / 3.0).abs() < 1e-15);
    let c = mask(3, 3, |_, _| true);
    assert_eq!(unsafe { ea_dice(a, c, &mut d) }, EaStatus::DimensionMismatch);
    assert!(last_error().contains("dimension mismatch"));
    unsafe {
        ea_mask_free(a);
        ea_mask_free(b);
        ea_mask_free(c);
    }
}

#[test]
fn null_arguments_are_reported() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ea_image_from_u8(ptr::null(), 2, 2, &mut out) }, EaStatus::NullPointer);
    assert!(out.is_null());
    let mut d = 0.0;
    assert_eq!(unsafe { ea_dice(ptr::null(), ptr::null(), &mut d) }, EaStatus::NullPointer);
    unsafe {
        ea_image_free(ptr::null_mut());
        ea_string_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_apply_is_deterministic() {
    let json = CString::new(
        r#"{"stages":[{"transform":"Affine","setting":"H","overrides":{"probability":1.0}},
                      {"transform":"GaussNoise","setting":"L"}],
            "seed":7,"output_size":null}"#,
    )
    .unwrap();
    let mut pipe = ptr::null_mut();
    assert_eq!(unsafe { ea_pipeline_from_json(json.as_ptr(), &mut pipe) }, EaStatus::Ok);

    let img = image(24, 20, |x, y| ((x + y) * 5) as u8);
    let lv = mask(24, 20, |x, y| (6..18).contains(&x) && (5..15).contains(&y));
    let mut sample = ptr::null_mut();
    assert_eq!(unsafe { ea_sample_new(img, lv, ptr::null(), &mut sample) }, EaStatus::Ok);

    let run = || {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ea_pipeline_apply(pipe, sample, 3, &mut out) }, EaStatus::Ok);
        let (mut oi, mut om) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(unsafe { ea_sample_image(out, &mut oi) }, EaStatus::Ok);
        assert_eq!(unsafe { ea_sample_lv_mask(out, &mut om) }, EaStatus::Ok);
        let mut px = vec![0u8; 480];
        let mut mk = vec![0u8; 480];
        unsafe {
            assert_eq!(ea_image_to_u8(oi, px.as_mut_ptr(), px.len()), EaStatus::Ok);
            assert_eq!(ea_mask_to_u8(om, mk.as_mut_ptr(), mk.len()), EaStatus::Ok);
            ea_image_free(oi);
            ea_mask_free(om);
            ea_sample_free(out);
        }
        (px, mk)
    };
    let (first, second) = (run(), run());
    assert_eq!(first, second);
    assert!(first.1.iter().all(|&v| v <= 1));
    unsafe {
        ea_sample_free(sample);
        ea_image_free(img);
        ea_mask_free(lv);
        ea_pipeline_free(pipe);
    }
}

#[test]
fn fan_transform_without_fan_is_rejected() {
    let json = CString::new(r#"{"stages":[{"transform":"DepthAttenuation","setting":"L"}],"seed":1}"#).unwrap();
    let mut pipe = ptr::null_mut();
    assert_eq!(unsafe { ea_pipeline_from_json(json.as_ptr(), &mut pipe) }, EaStatus::Ok);
    let img = image(8, 8, |_, _| 100);
    let lv = mask(8, 8, |_, _| false);
    let mut sample = ptr::null_mut();
    assert_eq!(unsafe { ea_sample_new(img, lv, ptr::null(), &mut sample) }, EaStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ea_pipeline_apply(pipe, sample, 0, &mut out) }, EaStatus::FanMaskRequired);
    assert!(out.is_null());
    assert!(last_error().contains("fan mask"));
    unsafe {
        ea_sample_free(sample);
        ea_image_free(img);
        ea_mask_free(lv);
        ea_pipeline_free(pipe);
    }
}

#[test]
fn unknown_preset_and_bad_json() {
    let mut pipe = ptr::null_mut();
    let json = CString::new(r#"{"stages":[{"transform":"Affine","setting":"C3"}]}"#).unwrap();
    assert_eq!(unsafe { ea_pipeline_from_json(json.as_ptr(), &mut pipe) }, EaStatus::PresetNotFound);
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { ea_pipeline_from_json(bad.as_ptr(), &mut pipe) }, EaStatus::InvalidArgument);
    assert!(pipe.is_null());
}

#[test]
fn fan_extraction_and_registry_export() {
    let img = image(40, 30, |x, y| if (x as i64 - 20).abs() <= y as i64 { 120 } else { 0 });
    let mut fan = ptr::null_mut();
    assert_eq!(unsafe { ea_fan_mask_extract(img, &mut fan) }, EaStatus::Ok);
    let mut buf = vec![0u8; 1200];
    assert_eq!(unsafe { ea_mask_to_u8(fan, buf.as_mut_ptr(), buf.len()) }, EaStatus::Ok);
    assert_eq!(buf[29 * 40 + 20], 1);
    assert_eq!(buf[0], 0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ea_registry_json(&mut json) }, EaStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"presets\""));
    unsafe {
        ea_string_free(json);
        ea_mask_free(fan);
        ea_image_free(img);
    }
}
