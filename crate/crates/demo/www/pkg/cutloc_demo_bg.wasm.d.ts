/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_barrierprofile_free: (a: number, b: number) => void;
export const __wbg_torussolve_free: (a: number, b: number) => void;
export const barrierProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
export const barrierprofile_b: (a: number) => number;
export const barrierprofile_c: (a: number) => number;
export const barrierprofile_distance: (a: number) => [number, number];
export const barrierprofile_laplacian: (a: number) => number;
export const barrierprofile_margin: (a: number) => number;
export const barrierprofile_offsets: (a: number) => [number, number];
export const barrierprofile_phi: (a: number) => [number, number];
export const barrierprofile_radius: (a: number) => number;
export const solveTorus: (a: number, b: number) => [number, number, number];
export const sphereBlowup: (a: number) => [number, number, number, number];
export const torussolve_coverage: (a: number) => number;
export const torussolve_gap: (a: number) => [number, number];
export const torussolve_iterations: (a: number) => number;
export const torussolve_kkt_residual: (a: number) => number;
export const torussolve_n: (a: number) => number;
export const torussolve_noncontact: (a: number) => [number, number];
export const torussolve_u: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
