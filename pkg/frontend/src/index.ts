export * from './types.js';
export * from './session.js';
export * from './stream.js';
export * from './client.js';
export * from './conversation.js';
export * from './render.js';
