/* tslint:disable */
/* eslint-disable */

export class BarrierProfile {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    b(): number;
    c(): number;
    distance(): Float64Array;
    laplacian(): number;
    margin(): number;
    /**
     * Signed offsets along `v − w` (the direction across the cut).
     */
    offsets(): Float64Array;
    phi(): Float64Array;
    radius(): number;
}

export class TorusSolve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    coverage(): number;
    /**
     * `d − u`, zero on the contact set.
     */
    gap(): Float64Array;
    iterations(): number;
    kkt_residual(): number;
    n(): number;
    noncontact(): Float64Array;
    /**
     * Row-major `n × n` values of the solution.
     */
    u(): Float64Array;
}

export function barrierProfile(px: number, py: number, a: number, points: number): BarrierProfile;

export function solveTorus(n: number, m: number): TorusSolve;

export function sphereBlowup(max_level: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_barrierprofile_free: (a: number, b: number) => void;
    readonly __wbg_torussolve_free: (a: number, b: number) => void;
    readonly barrierProfile: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly barrierprofile_b: (a: number) => number;
    readonly barrierprofile_c: (a: number) => number;
    readonly barrierprofile_distance: (a: number) => [number, number];
    readonly barrierprofile_laplacian: (a: number) => number;
    readonly barrierprofile_margin: (a: number) => number;
    readonly barrierprofile_offsets: (a: number) => [number, number];
    readonly barrierprofile_phi: (a: number) => [number, number];
    readonly barrierprofile_radius: (a: number) => number;
    readonly solveTorus: (a: number, b: number) => [number, number, number];
    readonly sphereBlowup: (a: number) => [number, number, number, number];
    readonly torussolve_coverage: (a: number) => number;
    readonly torussolve_gap: (a: number) => [number, number];
    readonly torussolve_iterations: (a: number) => number;
    readonly torussolve_kkt_residual: (a: number) => number;
    readonly torussolve_n: (a: number) => number;
    readonly torussolve_noncontact: (a: number) => [number, number];
    readonly torussolve_u: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
