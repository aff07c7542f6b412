/* tslint:disable */
/* eslint-disable */

/**
 * Layer record for `(mu, sigma)`; `mode` is `"paper"` or `"exp"`.
 */
export function buildLayer(mu: number, sigma: number, mode: string): string;

/**
 * RK4 trajectory of the gradient flow.
 */
export function flow(mu: number, sigma: number, step: number, t_end: number): string;

/**
 * Action of `g1`, `g2`, `g1inv` or `g2inv` on the embedded point.
 */
export function mobius(mu: number, sigma: number, generator: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly buildLayer: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly flow: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly mobius: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
