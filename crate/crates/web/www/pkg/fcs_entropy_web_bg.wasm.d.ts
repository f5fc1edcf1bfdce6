/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_spectrum_free: (a: number, b: number) => void;
export const curve_slope: (a: number) => number;
export const curve_x: (a: number) => [number, number];
export const curve_y: (a: number) => [number, number];
export const curve_y2: (a: number) => [number, number];
export const lattice_entropy: (a: number, b: number, c: number, d: number) => [number, number, number];
export const noise_curve: (a: number, b: number, c: number) => [number, number, number];
export const spectral_density: (a: number, b: number, c: number) => [number, number, number];
export const spectrum_entropy: (a: number) => number;
export const spectrum_factor: (a: number) => number;
export const spectrum_mu: (a: number) => [number, number];
export const spectrum_z: (a: number) => [number, number];
export const spectrum_z_minus: (a: number) => number;
export const spectrum_z_plus: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
