/* tslint:disable */
/* eslint-disable */

/**
 * Regime intervals of `(1, q_max]`.
 */
export function regime_map(n: number, q_max: number): string;

/**
 * The sharp constant `sup_l C(x; l)`.
 */
export function sharp_constant(geometry: string, n: number, q: string, position: number): string;

/**
 * `[[α, C(x; l_α)], …]` on `points` equally spaced angles in `[0, π]`.
 * `position` is ρ for the ball and x_n for the half-space.
 */
export function sweep_alpha(geometry: string, n: number, q: string, position: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly regime_map: (a: number, b: number) => [number, number, number, number];
    readonly sharp_constant: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sweep_alpha: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
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
