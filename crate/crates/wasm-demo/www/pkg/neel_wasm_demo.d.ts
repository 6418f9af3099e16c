/* tslint:disable */
/* eslint-disable */

/**
 * Relaxed single confined wall.
 */
export class Relaxed {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly energy: number;
    readonly iterations: number;
    readonly m1: Float64Array;
    readonly m2: Float64Array;
    /**
     * `π Γ / (2 log(1/δ))`.
     */
    readonly prediction: number;
    readonly x: Float64Array;
}

export function kernelConstant(): number;

export function kernelCurve(t_min: number, t_max: number, points: number): Float64Array;

export function relaxWall(alpha: number, epsilon: number, position: number, d: number, nodes: number): Relaxed;

export function wLandscape(model: string, alpha: number, d1: number, d2: number, lo: number, hi: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_relaxed_free: (a: number, b: number) => void;
    readonly kernelConstant: () => number;
    readonly kernelCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly relaxWall: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly relaxed_energy: (a: number) => number;
    readonly relaxed_iterations: (a: number) => number;
    readonly relaxed_m1: (a: number) => [number, number];
    readonly relaxed_m2: (a: number) => [number, number];
    readonly relaxed_prediction: (a: number) => number;
    readonly relaxed_x: (a: number) => [number, number];
    readonly wLandscape: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
