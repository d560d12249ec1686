// package: lodash
// symbols: template.apply
// imports: 1
const _ = require('lodash');
const f = _.template.apply;

function render(ctx) {
  return f(null, [ctx]); //@ template.apply:10
}
