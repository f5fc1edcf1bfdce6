/* tslint:disable */
/* eslint-disable */

export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Fitted slope against `ln x`, NaN when not computed.
     */
    readonly slope: number;
    readonly x: Float64Array;
    /**
     * Secondary series on the same abscissa.
     */
    readonly y2: Float64Array;
    readonly y: Float64Array;
}

export class Spectrum {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly entropy: number;
    readonly factor: number;
    readonly mu: Float64Array;
    readonly z: Float64Array;
    readonly z_minus: number;
    readonly z_plus: number;
}

export function lattice_entropy(sites: number, bond_ratio: number, t_max: number, points: number): Curve;

export function noise_curve(frequency_mhz: number, tau_ps: number, points: number): Curve;

export function spectral_density(d: number, g: number, samples: number): Spectrum;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_spectrum_free: (a: number, b: number) => void;
    readonly curve_slope: (a: number) => number;
    readonly curve_x: (a: number) => [number, number];
    readonly curve_y: (a: number) => [number, number];
    readonly curve_y2: (a: number) => [number, number];
    readonly lattice_entropy: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly noise_curve: (a: number, b: number, c: number) => [number, number, number];
    readonly spectral_density: (a: number, b: number, c: number) => [number, number, number];
    readonly spectrum_entropy: (a: number) => number;
    readonly spectrum_factor: (a: number) => number;
    readonly spectrum_mu: (a: number) => [number, number];
    readonly spectrum_z: (a: number) => [number, number];
    readonly spectrum_z_minus: (a: number) => number;
    readonly spectrum_z_plus: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
