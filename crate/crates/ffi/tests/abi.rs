use std::ffi::{CStr, CString};
use std::ptr;

use shapevec_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(shapevec_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn disc(side: usize, r: f64) -> Vec<u8> {
    let c = side as f64 / 2.0;
    (0..side * side)
        .map(|k| {
            let (x, y) = ((k % side) as f64 + 0.5 - c, (k / side) as f64 + 0.5 - c);
            (x * x + y * y <= r * r) as u8
        })
        .collect()
}

const CHEBY: u32 = ShapevecBasis::Chebyshev as u32;

#[test]
fn encode_decode_through_handles() {
    unsafe {
        let px = disc(48, 15.0);
        let mut mask = ptr::null_mut();
        assert_eq!(shapevec_mask_new(48, 48, px.as_ptr(), &mut mask), ShapevecStatus::Ok);
        let mut sv = ptr::null_mut();
        assert_eq!(
            shapevec_encode(mask, CHEBY, 20, std::f64::consts::PI / 180.0, false, &mut sv),
            ShapevecStatus::Ok
        );

        let (mut basis, mut len, mut cx, mut cy, mut scale) = (ShapevecBasis::Monomial, 0, 0.0, 0.0, -1.0);
        assert_eq!(
            shapevec_vector_info(sv, &mut basis, &mut len, &mut cx, &mut cy, &mut scale),
            ShapevecStatus::Ok
        );
        assert_eq!((basis, len, scale), (ShapevecBasis::Chebyshev, 20, 0.0));
        let mut coeffs = vec![0.0; len];
        assert_eq!(shapevec_vector_coeffs(sv, coeffs.as_mut_ptr(), len), ShapevecStatus::Ok);
        assert!((coeffs[0] - 15.0).abs() < 1.0);

        // single decode and batched decode agree
        let n = 360;
        let mut one = vec![0.0; 2 * n];
        assert_eq!(
            shapevec_decode_one(sv, n, one.as_mut_ptr(), one.len()),
            ShapevecStatus::Ok
        );
        let mut dec = ptr::null_mut();
        assert_eq!(shapevec_decoder_new(CHEBY, 20, n, &mut dec), ShapevecStatus::Ok);
        let batch_coeffs: Vec<f64> = coeffs.iter().chain(&coeffs).copied().collect();
        let centers = [cx, cy, cx + 5.0, cy - 2.0];
        let mut out = vec![0.0; 2 * 2 * n];
        assert_eq!(
            shapevec_decoder_decode(
                dec,
                2,
                batch_coeffs.as_ptr(),
                centers.as_ptr(),
                ptr::null(),
                out.as_mut_ptr(),
                out.len()
            ),
            ShapevecStatus::Ok
        );
        for j in 0..2 * n {
            assert!((out[j] - one[j]).abs() < 1e-12);
        }
        for j in 0..n {
            assert!((out[2 * n + j] - (one[j] + 5.0)).abs() < 1e-12);
            assert!((out[3 * n + j] - (one[n + j] - 2.0)).abs() < 1e-12);
        }

        // JSON round trip and loss
        let json = shapevec_vector_to_json(sv);
        assert!(!json.is_null());
        let mut back = ptr::null_mut();
        assert_eq!(shapevec_vector_from_json(json, &mut back), ShapevecStatus::Ok);
        shapevec_string_free(json);
        let mut loss = -1.0;
        assert_eq!(shapevec_shape_loss(sv, back, &mut loss), ShapevecStatus::Ok);
        assert_eq!(loss, 0.0);

        let mut same = -1.0;
        assert_eq!(shapevec_iou(mask, mask, &mut same), ShapevecStatus::Ok);
        assert_eq!(same, 1.0);

        shapevec_decoder_free(dec);
        shapevec_vector_free(back);
        shapevec_vector_free(sv);
        shapevec_mask_free(mask);
    }
}

#[test]
fn errors_map_to_codes_and_messages() {
    unsafe {
        let mut mask = ptr::null_mut();
        let zeros = [0u8; 16];
        assert_eq!(shapevec_mask_new(4, 4, zeros.as_ptr(), &mut mask), ShapevecStatus::Ok);
        let mut sv = ptr::null_mut();
        assert_eq!(
            shapevec_encode(mask, CHEBY, 8, 0.1, false, &mut sv),
            ShapevecStatus::InvalidArgument
        );
        assert!(last_error().contains("tau"), "{}", last_error());
        assert_eq!(
            shapevec_encode(mask, CHEBY, 8, std::f64::consts::PI / 180.0, false, &mut sv),
            ShapevecStatus::EmptyShape
        );
        assert!(sv.is_null(), "no handle on failure");
        assert_eq!(
            shapevec_encode(mask, 99, 8, 0.1, false, &mut sv),
            ShapevecStatus::InvalidArgument
        );
        assert!(last_error().contains("basis"));
        assert_eq!(
            shapevec_encode(ptr::null(), CHEBY, 8, 0.1, false, &mut sv),
            ShapevecStatus::NullPointer
        );

        let odd = [1.0, 2.0, 3.0];
        let fourier = ShapevecBasis::FourierFixed as u32;
        assert_eq!(
            shapevec_vector_new(0.0, 0.0, fourier, odd.as_ptr(), 3, 0.0, &mut sv),
            ShapevecStatus::InvalidArgument
        );

        let path = CString::new("/nonexistent/dir/mask.pbm").unwrap();
        let mut read = ptr::null_mut();
        assert_eq!(shapevec_mask_read(path.as_ptr(), &mut read), ShapevecStatus::Io);

        let garbage = CString::new("{not json").unwrap();
        assert_eq!(
            shapevec_vector_from_json(garbage.as_ptr(), &mut sv),
            ShapevecStatus::Parse
        );

        let ok = [10.0, 0.5];
        let mut a = ptr::null_mut();
        assert_eq!(
            shapevec_vector_new(0.0, 0.0, CHEBY, ok.as_ptr(), 2, 0.0, &mut a),
            ShapevecStatus::Ok
        );
        assert_eq!(last_error(), "");
        let mut b = ptr::null_mut();
        let longer = [10.0, 0.5, 0.1];
        assert_eq!(
            shapevec_vector_new(0.0, 0.0, CHEBY, longer.as_ptr(), 3, 0.0, &mut b),
            ShapevecStatus::Ok
        );
        let mut loss = 0.0;
        assert_eq!(shapevec_shape_loss(a, b, &mut loss), ShapevecStatus::DimensionMismatch);

        shapevec_vector_free(a);
        shapevec_vector_free(b);
        shapevec_mask_free(mask);
        shapevec_mask_free(ptr::null_mut());
    }
}

#[test]
fn pbm_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.pbm").to_str().unwrap()).unwrap();
    unsafe {
        let px = disc(13, 4.0);
        let mut mask = ptr::null_mut();
        assert_eq!(shapevec_mask_new(13, 13, px.as_ptr(), &mut mask), ShapevecStatus::Ok);
        assert_eq!(shapevec_mask_write_pbm(mask, path.as_ptr()), ShapevecStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(shapevec_mask_read(path.as_ptr(), &mut back), ShapevecStatus::Ok);
        let (mut w, mut h) = (0, 0);
        assert_eq!(shapevec_mask_size(back, &mut w, &mut h), ShapevecStatus::Ok);
        assert_eq!((w, h), (13, 13));
        let mut got = vec![0u8; w * h];
        assert_eq!(
            shapevec_mask_pixels(back, got.as_mut_ptr(), got.len()),
            ShapevecStatus::Ok
        );
        assert_eq!(got, px);
        shapevec_mask_free(mask);
        shapevec_mask_free(back);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/shapevec.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in [
        "typedef struct ShapevecMask ShapevecMask",
        "SHAPEVEC_STATUS_OK = 0",
        "SHAPEVEC_BASIS_CHEBYSHEV = 0",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c_when_a_compiler_is_available() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/shapevec.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(status.success());
}
