var E="button.ll-expand",h="button.ll-loadmore",p=".ll-math",g="ul.ll-values",x="ll-error",S="/api/values";function y(e,t,r,n,a){return`${S}?uri=${encodeURIComponent(e)}&property=${encodeURIComponent(t)}&direction=${encodeURIComponent(r)}&offset=${n}&limit=${a}`}function d(e,t){i(e);let r=document.createElement("span");r.className=x,r.textContent=t,e.insertAdjacentElement("afterend",r)}function i(e){let t=e.nextElementSibling;t&&t.classList.contains(x)&&t.remove()}var C=[{open:"$",close:"$",display:!1},{open:"\\(",close:"\\)",display:!1},{open:"\\[",close:"\\]",display:!0}];function A(e){let t=[],r="",n=0;for(;n<e.length;){let a=!1;for(let o of C){if(!e.startsWith(o.open,n))continue;let l=e.indexOf(o.close,n+o.open.length);if(l!==-1){l===n+o.open.length?r+=e.slice(n,l+o.close.length):(r&&(t.push({math:!1,text:r}),r=""),t.push({math:!0,raw:e.slice(n,l+o.close.length),body:e.slice(n+o.open.length,l),display:o.display})),n=l+o.close.length,a=!0;break}}a||(r+=e[n],n+=1)}return r&&t.push({math:!1,text:r}),t}var m=null;function H(){return m||(m=import("./lodlens-chunk-ZNYXZXBE.js").then(e=>e.default??e).catch(()=>null)),m}function w(e,t){let r=e.textContent??"",n=A(r);if(!n.some(o=>o.math)){e.dataset.typeset="skipped";return}let a=[];try{for(let o of n){if(!o.math){a.push(document.createTextNode(o.text));continue}let l=document.createElement("span");l.innerHTML=t.renderToString(o.body,{displayMode:o.display,throwOnError:!0}),a.push(l.firstElementChild??l)}}catch{e.dataset.typeset="failed";return}e.replaceChildren(...a),e.dataset.typeset="true"}async function s(e){let t=Array.from(e.querySelectorAll(`${p}:not([data-typeset])`));if(e instanceof HTMLElement&&e.matches(`${p}:not([data-typeset])`)&&t.unshift(e),t.length===0)return;let r=await H();if(r)for(let n of t)w(n,r)}var L=new WeakMap;function c(e,t){L.set(e,t),e.setAttribute("aria-expanded",t.state==="expanded"?"true":"false")}async function M(e){let t=L.get(e)??{state:"collapsed",cache:null};if(t.state==="loading")return;if(t.state==="expanded"&&t.cache){t.cache.remove(),c(e,{state:"collapsed",cache:t.cache});return}if(i(e),t.cache){e.insertAdjacentElement("afterend",t.cache),c(e,{state:"expanded",cache:t.cache});return}let r=e.dataset.expandUrl;if(!r)return;c(e,{state:"loading",cache:null});let n=null,a="";try{let o=await fetch(r);if(!o.ok)a=`request failed (${o.status})`;else{let l=document.createElement("template");l.innerHTML=(await o.text()).trim(),n=l.content.firstElementChild,n||(a="empty response")}}catch{a="network error"}if(!n){c(e,{state:"failed",cache:null,reason:a}),d(e,`could not expand: ${a}`);return}e.insertAdjacentElement("afterend",n),c(e,{state:"expanded",cache:n}),s(n)}var f=new WeakSet;function O(e){for(let t of["#","/"]){let r=e.lastIndexOf(t);if(r!==-1&&r+1<e.length)return e.slice(r+1)}return e}function R(e){let t=document.createElement("li");if(e.kind==="iri"){let n=document.createElement("a");return n.href=e.link??e.text,n.textContent=e.text,t.appendChild(n),t}let r=document.createElement("span");if(r.className=e.kind==="bnode"?"ll-bnode":e.is_math?"ll-math":"ll-literal",r.textContent=e.text,t.appendChild(r),e.kind==="literal"&&e.language){let n=document.createElement("span");n.className="ll-lang",n.textContent=`@${e.language}`,t.append(" ",n)}else if(e.kind==="literal"&&e.datatype){let n=document.createElement("span");n.className="ll-datatype",n.title=e.datatype,n.textContent=O(e.datatype),t.append(" ",n)}return t}function _(e){let{uri:t,property:r,direction:n,offset:a,limit:o,total:l}=e.dataset;return!t||!r||!n||!a||!o||!l?null:{uri:t,property:r,direction:n,offset:Number(a),limit:Number(o),total:Number(l)}}async function T(e){if(f.has(e))return;let t=_(e),r=e.parentElement?.querySelector(g);if(!(!t||!r)){f.add(e),e.setAttribute("disabled","disabled"),i(e);try{let n=await fetch(y(t.uri,t.property,t.direction,t.offset,t.limit));if(!n.ok)throw new Error(`${n.status}`);let a=await n.json();for(let l of a.values)r.appendChild(R(l));s(r);let o=t.offset+a.values.length;e.dataset.offset=String(o),e.dataset.total=String(a.total),o>=a.total&&e.remove()}catch{d(e,"could not load more values")}finally{f.delete(e),e.removeAttribute("disabled")}}}function u(e){e.addEventListener("click",t=>{let r=t.target;if(!(r instanceof Element))return;let n=r.closest(E);if(n){t.preventDefault(),M(n);return}let a=r.closest(h);a&&(t.preventDefault(),T(a))}),s(e)}document.readyState==="loading"?document.addEventListener("DOMContentLoaded",()=>u(document)):u(document);
